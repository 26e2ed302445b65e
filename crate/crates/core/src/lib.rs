//! Fault detection for cellular networks from KPI snapshots under class
//! imbalance and asymmetric misclassification costs.
//!
//! The pipeline is: simulate (or load) labeled KPI vectors, split them
//! stratified into train/test, standardize, rebalance the training partition
//! (random over/under-sampling or SMOTE), train a cost-sensitive linear SVM,
//! and evaluate it with ROC/AUC, precision-recall and cost accounting.
//!
//! ```text
//! simulate -> split -> fit scaler (train) -> scale -> resample (train) -> train -> score test
//! ```
//!
//! Class `0` is a fault and is treated as the positive class everywhere.

pub mod classify;
pub mod config;
pub mod dataio;
pub mod error;
pub mod evaluate;
pub mod experiments;
pub mod par;
pub mod plot;
pub mod resample;
pub mod simulate;

pub use classify::{CostMatrix, SvmHyperparams, SvmModel};
pub use dataio::{Dataset, Label, Sample, Scaler, FEATURE_NAMES, N_FEATURES};
pub use error::{Error, Result};
pub use evaluate::{ConfusionMatrix, RocCurve};
pub use par::Execution;
