//! Synthetic labeled KPI snapshots with injected faults.
//!
//! Each KPI is drawn from a class-conditional Gaussian and clamped to a
//! physically plausible range. Fault samples have degraded radio and service
//! KPIs and sit farther from the serving cell. Sample `t` draws from its own
//! ChaCha8 stream (`seed`, stream `t`), so generation order and execution mode
//! do not affect the output. Gaussian draws use the ziggurat sampler of
//! `rand_distr::StandardNormal`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::KeyValues;
use crate::dataio::{Dataset, Features, Label, Sample, FEATURE_NAMES, N_FEATURES};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

/// Per-KPI Gaussian parameters for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution {
    pub mean: Features,
    pub std: Features,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_fault: usize,
    pub n_ok: usize,
    pub fault: ClassDistribution,
    pub ok: ClassDistribution,
    /// Inclusive `(min, max)` per KPI.
    pub clamp: [(f64, f64); N_FEATURES],
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        default_scenario()
    }
}

/// Severe-outage KPI means. Used at full strength the two classes are
/// linearly separable and every ROC is trivial.
pub const SEVERE_FAULT_MEAN: Features = [0.85, 0.80, -105.0, -15.0, 3.0, 5.0, 900.0];

/// 117 fault and 3363 fault-free snapshots with LTE-like KPI ranges. Fault
/// means sit 30% of the way from the fault-free means to
/// [`SEVERE_FAULT_MEAN`], which leaves the classes overlapping.
pub fn default_scenario() -> SimConfig {
    SimConfig {
        n_fault: 117,
        n_ok: 3363,
        //            retain  ho     rsrp    rsrq   sinr  tput  dist
        ok: ClassDistribution {
            mean: [0.99, 0.97, -85.0, -9.0, 15.0, 25.0, 400.0],
            std: [0.01, 0.02, 6.0, 2.0, 5.0, 8.0, 200.0],
        },
        fault: ClassDistribution {
            mean: [0.948, 0.919, -91.0, -10.8, 11.4, 19.0, 550.0],
            std: [0.08, 0.10, 8.0, 3.0, 5.0, 4.0, 300.0],
        },
        clamp: [
            (0.0, 1.0),
            (0.0, 1.0),
            (-140.0, -40.0),
            (-25.0, 0.0),
            (-10.0, 40.0),
            (0.0, 150.0),
            (1.0, 3000.0),
        ],
        seed: 0,
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_fault == 0 || self.n_ok == 0 {
            return bad("class counts must be positive".into());
        }
        if self.n_fault > self.n_ok {
            return bad(format!(
                "n_fault ({}) must not exceed n_ok ({})",
                self.n_fault, self.n_ok
            ));
        }
        for k in 0..N_FEATURES {
            let name = FEATURE_NAMES[k];
            for (cls, d) in [("fault", &self.fault), ("ok", &self.ok)] {
                if !d.mean[k].is_finite() {
                    return bad(format!("{cls}.{name}_mean is not finite"));
                }
                if !(d.std[k] >= 0.0 && d.std[k].is_finite()) {
                    return bad(format!("{cls}.{name}_std must be a finite value >= 0"));
                }
            }
            let (lo, hi) = self.clamp[k];
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("clamp range for {name} is not ordered: [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    /// Override fields from `sim.*`, `fault.*`, `ok.*` and `clamp.*` keys,
    /// consuming them from `kv`.
    pub fn apply_key_values(&mut self, kv: &mut KeyValues) -> Result<()> {
        if let Some(v) = kv.take("sim.n_fault")? {
            self.n_fault = v;
        }
        if let Some(v) = kv.take("sim.n_ok")? {
            self.n_ok = v;
        }
        if let Some(v) = kv.take("sim.seed")? {
            self.seed = v;
        }
        for k in 0..N_FEATURES {
            let name = FEATURE_NAMES[k];
            for (cls, d) in [("fault", &mut self.fault), ("ok", &mut self.ok)] {
                if let Some(v) = kv.take(&format!("{cls}.{name}_mean"))? {
                    d.mean[k] = v;
                }
                if let Some(v) = kv.take(&format!("{cls}.{name}_std"))? {
                    d.std[k] = v;
                }
            }
            if let Some(v) = kv.take(&format!("clamp.{name}_min"))? {
                self.clamp[k].0 = v;
            }
            if let Some(v) = kv.take(&format!("clamp.{name}_max"))? {
                self.clamp[k].1 = v;
            }
        }
        Ok(())
    }

    /// The configuration in `section.key = value` form; parses back through
    /// [`SimConfig::apply_key_values`].
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "sim.n_fault = {}", self.n_fault).unwrap();
        writeln!(out, "sim.n_ok = {}", self.n_ok).unwrap();
        writeln!(out, "sim.seed = {}", self.seed).unwrap();
        for (cls, d) in [("fault", &self.fault), ("ok", &self.ok)] {
            for k in 0..N_FEATURES {
                writeln!(out, "{cls}.{}_mean = {:?}", FEATURE_NAMES[k], d.mean[k]).unwrap();
                writeln!(out, "{cls}.{}_std = {:?}", FEATURE_NAMES[k], d.std[k]).unwrap();
            }
        }
        for k in 0..N_FEATURES {
            writeln!(out, "clamp.{}_min = {:?}", FEATURE_NAMES[k], self.clamp[k].0).unwrap();
            writeln!(out, "clamp.{}_max = {:?}", FEATURE_NAMES[k], self.clamp[k].1).unwrap();
        }
        out
    }
}

fn draw(rng: &mut ChaCha8Rng, dist: &ClassDistribution, clamp: &[(f64, f64); N_FEATURES]) -> Features {
    std::array::from_fn(|k| {
        let z: f64 = rng.sample(StandardNormal);
        (dist.mean[k] + dist.std[k] * z).clamp(clamp[k].0, clamp[k].1)
    })
}

pub fn generate_dataset(config: &SimConfig) -> Result<Dataset> {
    generate_dataset_with(config, Execution::default())
}

pub fn generate_dataset_with(config: &SimConfig, exec: Execution) -> Result<Dataset> {
    config.validate()?;
    let n = config.n_fault + config.n_ok;
    let mut samples = map_indexed(exec, n, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(t as u64);
        let (label, dist) = if t < config.n_fault {
            (Label::Fault, &config.fault)
        } else {
            (Label::FaultFree, &config.ok)
        };
        Sample { features: draw(&mut rng, dist, &config.clamp), label }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX);
    samples.shuffle(&mut rng);
    Ok(Dataset::new(samples))
}
