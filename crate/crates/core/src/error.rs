use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("class {label} has {count} samples, need at least {required}")]
    ClassTooSmall {
        label: u8,
        count: usize,
        required: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible resampling target: {0}")]
    InfeasibleTarget(String),

    #[error("training set contains a single class")]
    SingleClass,

    #[error("solver did not converge in {iterations} iterations (KKT violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("metric undefined: {0}")]
    Undefined(String),

    #[error("plot: {0}")]
    Plot(String),

    #[error("model file {path}: {source}")]
    Model {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
