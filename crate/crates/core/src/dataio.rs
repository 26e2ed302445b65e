//! Labeled KPI samples, CSV persistence, stratified splitting and z-score
//! standardization.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_FEATURES: usize = 7;

/// KPI columns in their fixed order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "retainability",
    "ho_success_rate",
    "rsrp",
    "rsrq",
    "sinr",
    "throughput",
    "distance",
];

pub const CSV_HEADER: &str = "label,retainability,ho_success_rate,rsrp,rsrq,sinr,throughput,distance";

pub type Features = [f64; N_FEATURES];

/// Class of a sample. `Fault` is class 0 and is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Fault = 0,
    FaultFree = 1,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Fault, Label::FaultFree];

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn other(self) -> Label {
        match self {
            Label::Fault => Label::FaultFree,
            Label::FaultFree => Label::Fault,
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for Label {
    type Error = Error;

    fn try_from(v: u8) -> Result<Label> {
        match v {
            0 => Ok(Label::Fault),
            1 => Ok(Label::FaultFree),
            _ => Err(Error::InvalidSample(format!("label {v} outside {{0, 1}}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: Features,
    pub label: Label,
}

impl Sample {
    /// Fails on non-finite features.
    pub fn new(features: Features, label: Label) -> Result<Self> {
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "feature `{}` is not finite ({})",
                FEATURE_NAMES[i], features[i]
            )));
        }
        Ok(Self { features, label })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub feature_names: [String; N_FEATURES],
}

impl Default for Dataset {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self {
            samples,
            feature_names: FEATURE_NAMES.map(String::from),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Indices of samples with the given label, in dataset order.
    pub fn indices_of(&self, label: Label) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// The less frequent class; ties resolve to `Fault`.
    pub fn minority(&self) -> Label {
        if self.count(Label::Fault) <= self.count(Label::FaultFree) {
            Label::Fault
        } else {
            Label::FaultFree
        }
    }

    /// minority count / majority count, or `None` when a class is absent.
    pub fn imbalance_ratio(&self) -> Option<f64> {
        let a = self.count(Label::Fault);
        let b = self.count(Label::FaultFree);
        if a == 0 || b == 0 {
            None
        } else {
            Some(a.min(b) as f64 / a.max(b) as f64)
        }
    }
}

fn format_real(out: &mut String, v: f64) {
    // 17 significant digits: exact round trip for every finite f64.
    write!(out, "{v:.16e}").unwrap();
}

/// Render a dataset in the canonical CSV form.
pub fn to_csv_string(dataset: &Dataset) -> String {
    let mut out = String::with_capacity(32 + dataset.len() * 8 * 24);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &dataset.samples {
        out.push(if s.label == Label::Fault { '0' } else { '1' });
        for &v in &s.features {
            out.push(',');
            format_real(&mut out, v);
        }
        out.push('\n');
    }
    out
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    std::fs::write(path, to_csv_string(dataset)).map_err(|e| Error::io(path, e))
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path)
}

/// Parse canonical CSV text. `source` is only used in error messages.
/// Line numbers count the header as line 1.
pub fn parse_csv(text: &str, source: &Path) -> Result<Dataset> {
    let err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.split('\n').enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
        Some((_, h)) => return Err(err(1, format!("expected header `{CSV_HEADER}`, got `{h}`"))),
        None => return Err(err(1, "missing header".into())),
    }
    let mut samples = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != N_FEATURES + 1 {
            return Err(err(line, format!("expected {} fields, got {}", N_FEATURES + 1, fields.len())));
        }
        let label = match fields[0].trim() {
            "0" => Label::Fault,
            "1" => Label::FaultFree,
            other => return Err(err(line, format!("label `{other}` outside {{0, 1}}"))),
        };
        let mut features = [0.0; N_FEATURES];
        for (k, field) in fields[1..].iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(line, format!("`{}`: non-numeric value `{field}`", FEATURE_NAMES[k])))?;
            if !v.is_finite() {
                return Err(err(line, format!("`{}`: non-finite value `{field}`", FEATURE_NAMES[k])));
            }
            features[k] = v;
        }
        samples.push(Sample { features, label });
    }
    Ok(Dataset::new(samples))
}

/// Per-class seeded shuffle; the first `round(test_fraction * n_c)` shuffled
/// samples of each class go to the test partition. Both partitions keep the
/// input order.
pub fn stratified_split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction {test_fraction} not in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; dataset.len()];
    for label in Label::BOTH {
        let mut idx = dataset.indices_of(label);
        if idx.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: label.as_u8(),
                count: idx.len(),
                required: 2,
            });
        }
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * test_fraction).round() as usize;
        for &i in &idx[..n_test] {
            in_test[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (s, t) in dataset.samples.iter().zip(&in_test) {
        if *t {
            test.push(*s);
        } else {
            train.push(*s);
        }
    }
    Ok((
        Dataset { samples: train, feature_names: dataset.feature_names.clone() },
        Dataset { samples: test, feature_names: dataset.feature_names.clone() },
    ))
}

/// Per-feature z-score parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Features,
    pub std: Features,
}

impl Scaler {
    pub fn transform(&self, x: &Features) -> Features {
        std::array::from_fn(|k| (x[k] - self.mean[k]) / self.std[k])
    }

    pub fn inverse(&self, z: &Features) -> Features {
        std::array::from_fn(|k| z[k] * self.std[k] + self.mean[k])
    }
}

/// Population mean and standard deviation of each feature. Zero deviations
/// are clamped to 1.
pub fn fit_scaler(train: &Dataset) -> Result<Scaler> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = train.len() as f64;
    let mut mean = [0.0; N_FEATURES];
    for s in &train.samples {
        for k in 0..N_FEATURES {
            mean[k] += s.features[k];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; N_FEATURES];
    for s in &train.samples {
        for k in 0..N_FEATURES {
            let d = s.features[k] - mean[k];
            var[k] += d * d;
        }
    }
    let std = var.map(|v| {
        let sd = (v / n).sqrt();
        if sd > 0.0 && sd.is_finite() {
            sd
        } else {
            1.0
        }
    });
    Ok(Scaler { mean, std })
}

pub fn apply_scaler(scaler: &Scaler, dataset: &Dataset) -> Dataset {
    Dataset {
        samples: dataset
            .samples
            .iter()
            .map(|s| Sample { features: scaler.transform(&s.features), label: s.label })
            .collect(),
        feature_names: dataset.feature_names.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(x0: f64, label: Label) -> Sample {
        let mut f = [0.0; N_FEATURES];
        f[0] = x0;
        Sample { features: f, label }
    }

    #[test]
    fn csv_two_rows() {
        let d = Dataset::new(vec![sample(0.5, Label::Fault), sample(-85.25, Label::FaultFree)]);
        let text = to_csv_string(&d);
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(CSV_HEADER));
        let back = parse_csv(&text, Path::new("x")).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn csv_one_sample_two_lines() {
        let d = Dataset::new(vec![sample(1.0, Label::Fault)]);
        assert_eq!(to_csv_string(&d).lines().count(), 2);
    }

    #[test]
    fn csv_bad_label_names_row() {
        let d = Dataset::new((0..5).map(|i| sample(i as f64, Label::FaultFree)).collect());
        let mut text = to_csv_string(&d);
        // data row 5 sits on line 6 (header is line 1)
        let lines: Vec<String> = text.lines().map(String::from).collect();
        let mut bad = lines.clone();
        bad[5] = format!("2{}", &lines[5][1..]);
        text = bad.join("\n");
        match parse_csv(&text, Path::new("x")).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 6);
                assert!(message.contains("label"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn csv_errors() {
        let p = Path::new("x");
        assert!(parse_csv("label,a,b\n", p).is_err());
        let h = CSV_HEADER;
        assert!(parse_csv(&format!("{h}\n0,1,2,3\n"), p).is_err());
        assert!(parse_csv(&format!("{h}\n0,1,2,3,4,5,6,abc\n"), p).is_err());
        assert!(parse_csv(&format!("{h}\n0,1,2,3,4,5,6,NaN\n"), p).is_err());
        assert!(parse_csv(&format!("{h}\n0,1,2,3,4,5,6,inf\n"), p).is_err());
        assert!(load_csv(Path::new("/nonexistent/file.csv")).is_err());
        assert!(matches!(save_csv(&Dataset::default(), Path::new("/tmp/x.csv")), Err(Error::EmptyDataset)));
    }

    #[test]
    fn sample_rejects_non_finite() {
        let mut f = [0.0; N_FEATURES];
        f[3] = f64::NAN;
        assert!(Sample::new(f, Label::Fault).is_err());
        assert!(Label::try_from(2).is_err());
    }

    #[test]
    fn split_worked_counts() {
        let mut s: Vec<Sample> = (0..117).map(|i| sample(i as f64, Label::Fault)).collect();
        s.extend((0..3363).map(|i| sample(i as f64, Label::FaultFree)));
        let d = Dataset::new(s);
        let (train, test) = stratified_split(&d, 0.2, 7).unwrap();
        assert_eq!(test.len(), 696);
        assert_eq!(train.len(), 2784);
        assert_eq!(test.count(Label::Fault), 23);
        assert_eq!(test.count(Label::FaultFree), 673);
    }

    #[test]
    fn split_half_balanced_and_deterministic() {
        // 10 samples per class
        let d = Dataset::new(
            (0..20)
                .map(|i| sample(i as f64, if i % 2 == 0 { Label::Fault } else { Label::FaultFree }))
                .collect(),
        );
        let (train, test) = stratified_split(&d, 0.5, 1).unwrap();
        assert_eq!((train.count(Label::Fault), train.count(Label::FaultFree)), (5, 5));
        assert_eq!((test.count(Label::Fault), test.count(Label::FaultFree)), (5, 5));
        let again = stratified_split(&d, 0.5, 1).unwrap();
        assert_eq!(again, (train, test));
    }

    #[test]
    fn split_half_rounds_each_class() {
        // 5 per class: round(2.5) = 3 per class goes to test
        let d = Dataset::new(
            (0..10)
                .map(|i| sample(i as f64, if i % 2 == 0 { Label::Fault } else { Label::FaultFree }))
                .collect(),
        );
        let (train, test) = stratified_split(&d, 0.5, 1).unwrap();
        assert_eq!((train.len(), test.len()), (4, 6));
        assert_eq!(test.count(Label::Fault), test.count(Label::FaultFree));
    }

    #[test]
    fn split_rejects_tiny_class() {
        let d = Dataset::new(vec![
            sample(0.0, Label::Fault),
            sample(1.0, Label::FaultFree),
            sample(2.0, Label::FaultFree),
        ]);
        assert!(matches!(
            stratified_split(&d, 0.2, 0),
            Err(Error::ClassTooSmall { label: 0, count: 1, .. })
        ));
    }

    #[test]
    fn scaler_two_points() {
        let d = Dataset::new(vec![sample(1.0, Label::Fault), sample(3.0, Label::FaultFree)]);
        let sc = fit_scaler(&d).unwrap();
        let z = apply_scaler(&sc, &d);
        assert_eq!(z.samples[0].features[0], -1.0);
        assert_eq!(z.samples[1].features[0], 1.0);
        // constant columns: deviation clamped, scaled to zero
        assert_eq!(sc.std[1], 1.0);
        assert!(z.samples.iter().all(|s| s.features[1] == 0.0));
        assert!(fit_scaler(&Dataset::default()).is_err());
    }
}
