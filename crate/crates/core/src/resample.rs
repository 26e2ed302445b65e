//! Rebalancing of imbalanced training sets.
//!
//! Random oversampling duplicates minority samples, random undersampling
//! drops majority samples, the combined method meets in between, and SMOTE
//! synthesizes new minority points from a sample and one of its k nearest
//! minority neighbours. Every method keeps the untouched class bit-identical
//! and appends new samples after the retained originals.

use std::str::FromStr;

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataio::{Dataset, Features, Label, Sample, N_FEATURES};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

/// Direction of the SMOTE step relative to the chosen neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoteMode {
    /// `x_i + u * (x_i - x_j)`: steps away from the neighbour.
    #[default]
    Extrapolate,
    /// `x_i + u * (x_j - x_i)`: interpolates towards the neighbour.
    Canonical,
}

impl FromStr for SmoteMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" | "extrapolate" => Ok(SmoteMode::Extrapolate),
            "canonical" => Ok(SmoteMode::Canonical),
            _ => Err(format!("unknown SMOTE mode `{s}` (expected paper|canonical)")),
        }
    }
}

impl std::fmt::Display for SmoteMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SmoteMode::Extrapolate => "paper",
            SmoteMode::Canonical => "canonical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleConfig {
    /// Desired minority/majority count ratio, in (0, 1].
    pub target_ratio: f64,
    /// SMOTE neighbour count.
    pub k: usize,
    pub mode: SmoteMode,
    pub seed: u64,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        Self { target_ratio: 1.0, k: 5, mode: SmoteMode::Extrapolate, seed: 0 }
    }
}

impl ResampleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target_ratio {} not in (0, 1]",
                self.target_ratio
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        Ok(())
    }
}

struct ClassSplit {
    minority: Label,
    minority_idx: Vec<usize>,
    majority_idx: Vec<usize>,
}

fn split_classes(dataset: &Dataset) -> Result<ClassSplit> {
    let minority = dataset.minority();
    let minority_idx = dataset.indices_of(minority);
    let majority_idx = dataset.indices_of(minority.other());
    for (label, idx) in [(minority, &minority_idx), (minority.other(), &majority_idx)] {
        if idx.is_empty() {
            return Err(Error::ClassTooSmall { label: label.as_u8(), count: 0, required: 1 });
        }
    }
    Ok(ClassSplit { minority, minority_idx, majority_idx })
}

/// Floor that treats values within 1e-9 (relative) of an integer as that
/// integer, so `0.29 * 100` counts as 29 and not 28.
fn floor_count(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Minority count after oversampling to `ratio` of the majority.
pub fn oversample_target(minority: usize, majority: usize, ratio: f64) -> usize {
    floor_count(ratio * majority as f64).max(minority)
}

/// Majority count after undersampling to reach `ratio`.
pub fn undersample_target(minority: usize, majority: usize, ratio: f64) -> usize {
    floor_count(minority as f64 / ratio).min(majority)
}

/// Common size of both classes after the combined method.
pub fn combined_target(minority: usize, majority: usize, midpoint: f64) -> usize {
    let m = (majority as f64 * (minority as f64 / majority as f64).powf(midpoint)).round() as usize;
    m.clamp(minority, majority)
}

/// Duplicate minority samples, drawn uniformly with replacement, until the
/// minority reaches `floor(target_ratio * majority)`.
pub fn random_oversample(dataset: &Dataset, config: &ResampleConfig) -> Result<Dataset> {
    config.validate()?;
    let cs = split_classes(dataset)?;
    let target = oversample_target(cs.minority_idx.len(), cs.majority_idx.len(), config.target_ratio);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(oversample_to(dataset, &cs.minority_idx, target, &mut rng))
}

fn oversample_to(dataset: &Dataset, minority_idx: &[usize], target: usize, rng: &mut ChaCha8Rng) -> Dataset {
    let extra = target.saturating_sub(minority_idx.len());
    let mut samples = dataset.samples.clone();
    samples.reserve(extra);
    for _ in 0..extra {
        let &i = minority_idx.choose(rng).expect("minority is non-empty");
        samples.push(dataset.samples[i]);
    }
    Dataset { samples, feature_names: dataset.feature_names.clone() }
}

/// Keep a uniform subset (without replacement) of the majority of size
/// `floor(minority / target_ratio)`.
pub fn random_undersample(dataset: &Dataset, config: &ResampleConfig) -> Result<Dataset> {
    config.validate()?;
    let cs = split_classes(dataset)?;
    let target = undersample_target(cs.minority_idx.len(), cs.majority_idx.len(), config.target_ratio);
    if target == 0 {
        return Err(Error::InfeasibleTarget(format!(
            "floor({} / {}) = 0 majority samples",
            cs.minority_idx.len(),
            config.target_ratio
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(undersample_to(dataset, &cs, target, &mut rng))
}

fn undersample_to(dataset: &Dataset, cs: &ClassSplit, target: usize, rng: &mut ChaCha8Rng) -> Dataset {
    let mut keep = vec![true; dataset.len()];
    if target < cs.majority_idx.len() {
        for &i in &cs.majority_idx {
            keep[i] = false;
        }
        for pos in index::sample(rng, cs.majority_idx.len(), target) {
            keep[cs.majority_idx[pos]] = true;
        }
    }
    let samples = dataset
        .samples
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(s, _)| *s)
        .collect();
    Dataset { samples, feature_names: dataset.feature_names.clone() }
}

/// Undersample the majority to `round(majority * (minority/majority)^midpoint)`
/// and then oversample the minority up to the same count.
///
/// `midpoint = 0` is pure oversampling, `midpoint = 1` pure undersampling.
/// `config.target_ratio` is not used; the result is always balanced.
pub fn combined_resample(dataset: &Dataset, config: &ResampleConfig, midpoint: f64) -> Result<Dataset> {
    config.validate()?;
    if !(0.0..=1.0).contains(&midpoint) {
        return Err(Error::InvalidConfig(format!("midpoint {midpoint} not in [0, 1]")));
    }
    let cs = split_classes(dataset)?;
    let target = combined_target(cs.minority_idx.len(), cs.majority_idx.len(), midpoint);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let reduced = undersample_to(dataset, &cs, target, &mut rng);
    let minority_idx = reduced.indices_of(cs.minority);
    Ok(oversample_to(&reduced, &minority_idx, target, &mut rng))
}

/// k nearest minority neighbours of every minority sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    /// Dataset index of each minority sample; rows are aligned with it.
    pub minority_indices: Vec<usize>,
    /// For each minority position, neighbour positions (into
    /// `minority_indices`) by nondecreasing distance, ties by lower position.
    pub rows: Vec<Vec<usize>>,
}

pub(crate) fn squared_distance(a: &Features, b: &Features) -> f64 {
    let mut d = 0.0;
    for k in 0..N_FEATURES {
        let t = a[k] - b[k];
        d += t * t;
    }
    d
}

pub fn knn_minority(dataset: &Dataset, k: usize) -> Result<NeighborTable> {
    knn_minority_with(dataset, k, Execution::default())
}

/// Exact Euclidean k-NN among the minority class.
pub fn knn_minority_with(dataset: &Dataset, k: usize, exec: Execution) -> Result<NeighborTable> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let minority = dataset.minority();
    let minority_indices = dataset.indices_of(minority);
    let n = minority_indices.len();
    if n < 2 {
        return Err(Error::ClassTooSmall { label: minority.as_u8(), count: n, required: 2 });
    }
    let points: Vec<&Features> = minority_indices.iter().map(|&i| &dataset.samples[i].features).collect();
    let kk = k.min(n - 1);
    let rows = map_indexed(exec, n, |q| {
        // bounded insertion into a sorted (distance, position) list
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(kk + 1);
        for (p, x) in points.iter().enumerate() {
            if p == q {
                continue;
            }
            let d = squared_distance(points[q], x);
            if best.len() == kk && d >= best[kk - 1].0 {
                continue;
            }
            let at = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(at, (d, p));
            best.truncate(kk);
        }
        best.into_iter().map(|(_, p)| p).collect()
    });
    Ok(NeighborTable { minority_indices, rows })
}

/// One synthetic sample's provenance. `base` and `neighbor` are dataset
/// indices into the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Synthesis {
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput {
    /// Input samples followed by the synthetic ones.
    pub dataset: Dataset,
    /// Aligned with the appended samples.
    pub synthesized: Vec<Synthesis>,
}

pub fn smote_point(xi: &Features, xj: &Features, u: f64, mode: SmoteMode) -> Features {
    std::array::from_fn(|k| match mode {
        SmoteMode::Extrapolate => xi[k] + u * (xi[k] - xj[k]),
        SmoteMode::Canonical => xi[k] + u * (xj[k] - xi[k]),
    })
}

pub fn smote(dataset: &Dataset, config: &ResampleConfig) -> Result<SmoteOutput> {
    smote_with(dataset, config, Execution::default())
}

/// Synthesize `floor(target_ratio * majority) - minority` new minority
/// samples. Synthetic sample `t` uses its own ChaCha8 stream, so the result
/// does not depend on `exec`.
pub fn smote_with(dataset: &Dataset, config: &ResampleConfig, exec: Execution) -> Result<SmoteOutput> {
    config.validate()?;
    let cs = split_classes(dataset)?;
    let target = oversample_target(cs.minority_idx.len(), cs.majority_idx.len(), config.target_ratio);
    let table = knn_minority_with(dataset, config.k, exec)?;
    let n_new = target - cs.minority_idx.len();
    let minority = cs.minority;

    let synthesized = map_indexed(exec, n_new, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(t as u64);
        let pos = rng.random_range(0..table.minority_indices.len());
        let row = &table.rows[pos];
        let nb = row[rng.random_range(0..row.len())];
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        Synthesis { base: table.minority_indices[pos], neighbor: table.minority_indices[nb], u }
    });

    let mut samples = dataset.samples.clone();
    samples.extend(synthesized.iter().map(|s| Sample {
        features: smote_point(
            &dataset.samples[s.base].features,
            &dataset.samples[s.neighbor].features,
            s.u,
            config.mode,
        ),
        label: minority,
    }));
    Ok(SmoteOutput {
        dataset: Dataset { samples, feature_names: dataset.feature_names.clone() },
        synthesized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, label: Label) -> Sample {
        let mut f = [0.0; N_FEATURES];
        f[0] = x;
        Sample { features: f, label }
    }

    fn imbalanced(n_min: usize, n_maj: usize) -> Dataset {
        let mut s: Vec<Sample> = (0..n_min).map(|i| pt(i as f64, Label::Fault)).collect();
        s.extend((0..n_maj).map(|i| pt(100.0 + i as f64, Label::FaultFree)));
        Dataset::new(s)
    }

    fn cfg(ratio: f64) -> ResampleConfig {
        ResampleConfig { target_ratio: ratio, seed: 3, ..Default::default() }
    }

    #[test]
    fn decimal_ratios_count_as_written() {
        assert_eq!(oversample_target(1, 100, 0.29), 29);
        assert_eq!(oversample_target(1, 100, 0.299), 29);
        assert_eq!(undersample_target(29, 1000, 0.29), 100);
    }

    #[test]
    fn oversample_worked_counts() {
        let out = random_oversample(&imbalanced(117, 3363), &cfg(1.0)).unwrap();
        assert_eq!(out.count(Label::Fault), 3363);
        assert_eq!(out.count(Label::FaultFree), 3363);
    }

    #[test]
    fn oversample_retains_originals() {
        let d = imbalanced(2, 10);
        let out = random_oversample(&d, &cfg(0.5)).unwrap();
        assert_eq!(out.count(Label::Fault), 5);
        assert_eq!(&out.samples[..d.len()], &d.samples[..]);
        for s in &out.samples[d.len()..] {
            assert!(d.samples[..2].contains(s));
        }
    }

    #[test]
    fn balanced_input_unchanged() {
        let d = imbalanced(6, 6);
        assert_eq!(random_oversample(&d, &cfg(1.0)).unwrap(), d);
        assert_eq!(random_undersample(&d, &cfg(1.0)).unwrap(), d);
    }

    #[test]
    fn undersample_worked_counts() {
        let d = imbalanced(117, 3363);
        let out = random_undersample(&d, &cfg(1.0)).unwrap();
        assert_eq!((out.count(Label::Fault), out.count(Label::FaultFree)), (117, 117));
        // sub-multiset of the input majority: features are distinct here
        for s in out.samples.iter().filter(|s| s.label == Label::FaultFree) {
            assert!(d.samples.contains(s));
        }
    }

    #[test]
    fn combined_counts_and_limits() {
        let d = imbalanced(117, 3363);
        assert_eq!(combined_target(117, 3363, 0.5), 627);
        let out = combined_resample(&d, &cfg(1.0), 0.5).unwrap();
        assert_eq!((out.count(Label::Fault), out.count(Label::FaultFree)), (627, 627));
        assert_eq!(combined_target(117, 3363, 0.0), 3363);
        assert_eq!(combined_target(117, 3363, 1.0), 117);
        assert!(combined_resample(&d, &cfg(1.0), 1.5).is_err());
    }

    #[test]
    fn errors() {
        let d = imbalanced(0, 5);
        assert!(random_oversample(&d, &cfg(1.0)).is_err());
        assert!(random_undersample(&d, &cfg(1.0)).is_err());
        assert!(random_oversample(&imbalanced(2, 5), &cfg(0.0)).is_err());
        assert!(random_oversample(&imbalanced(2, 5), &cfg(1.5)).is_err());
        assert!(smote(&imbalanced(1, 5), &cfg(1.0)).is_err());
        assert!(knn_minority(&imbalanced(1, 5), 3).is_err());
    }

    #[test]
    fn knn_collinear() {
        let d = Dataset::new(vec![
            pt(0.0, Label::Fault),
            pt(1.0, Label::Fault),
            pt(3.0, Label::Fault),
            pt(50.0, Label::FaultFree),
            pt(51.0, Label::FaultFree),
            pt(52.0, Label::FaultFree),
            pt(53.0, Label::FaultFree),
        ]);
        let t = knn_minority(&d, 1).unwrap();
        assert_eq!(t.rows, vec![vec![1], vec![0], vec![1]]);
        let t = knn_minority(&d, 10).unwrap();
        assert!(t.rows.iter().all(|r| r.len() == 2));
        assert_eq!(t.rows[1], vec![0, 2]);
    }

    #[test]
    fn knn_ties_by_lower_index() {
        let d = Dataset::new(vec![
            pt(1.0, Label::Fault),
            pt(0.0, Label::Fault),
            pt(-1.0, Label::Fault),
            pt(9.0, Label::FaultFree),
            pt(9.0, Label::FaultFree),
            pt(9.0, Label::FaultFree),
        ]);
        let t = knn_minority(&d, 1).unwrap();
        assert_eq!(t.rows[1], vec![0]);
    }

    #[test]
    fn smote_formula() {
        let mut a = [0.0; N_FEATURES];
        let mut b = [0.0; N_FEATURES];
        b[0] = 1.0;
        b[1] = 1.0;
        a[2] = 0.0;
        let p = smote_point(&a, &b, 0.5, SmoteMode::Extrapolate);
        assert_eq!((p[0], p[1]), (-0.5, -0.5));
        let c = smote_point(&a, &b, 0.5, SmoteMode::Canonical);
        assert_eq!((c[0], c[1]), (0.5, 0.5));
    }

    #[test]
    fn smote_worked_counts_and_bookkeeping() {
        let d = imbalanced(117, 3363);
        let out = smote(&d, &cfg(1.0)).unwrap();
        assert_eq!(out.synthesized.len(), 3246);
        assert_eq!(out.dataset.count(Label::Fault), 3363);
        assert_eq!(&out.dataset.samples[..d.len()], &d.samples[..]);
        for (s, syn) in out.dataset.samples[d.len()..].iter().zip(&out.synthesized) {
            assert_eq!(s.label, Label::Fault);
            assert!(syn.u > 0.0 && syn.u < 1.0);
            assert_ne!(syn.base, syn.neighbor);
        }
    }

    #[test]
    fn smote_mode_and_seed() {
        let d = imbalanced(20, 100);
        let a = smote_with(&d, &cfg(1.0), Execution::Sequential).unwrap();
        let b = smote_with(&d, &cfg(1.0), Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = smote(&d, &ResampleConfig { seed: 4, ..cfg(1.0) }).unwrap();
        assert_ne!(a.synthesized, c.synthesized);
        assert_eq!(a.dataset.len(), c.dataset.len());
    }
}
