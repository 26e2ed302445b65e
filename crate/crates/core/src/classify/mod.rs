//! Cost-sensitive linear soft-margin SVM.
//!
//! Training minimizes
//!
//! ```text
//! 1/2 |w|^2 + C * sum_i kappa(y_i) * xi_i,   y_i (w.x_i + b) >= 1 - xi_i,  xi_i >= 0
//! ```
//!
//! with `kappa = c01` for faults (mapped to +1) and `kappa = c10` for
//! fault-free samples (mapped to -1). The dual is solved by SMO with
//! second-order working-set selection; the weight vector is kept explicitly
//! since the kernel is linear. By default SMO starts from an interior-point
//! estimate rounded onto the box, which removes the long SMO tail on heavily
//! overlapping classes; the stopping rule is the same either way.

mod interior;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::{Dataset, Features, Label, Sample, Scaler, N_FEATURES};
use crate::error::{Error, Result};

/// `c_ij` is the cost of classifying a true class-`i` sample as class `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    pub c00: f64,
    pub c01: f64,
    pub c10: f64,
    pub c11: f64,
}

impl Default for CostMatrix {
    fn default() -> Self {
        Self::with_ratio(1.0)
    }
}

impl CostMatrix {
    pub fn new(c00: f64, c01: f64, c10: f64, c11: f64) -> Result<Self> {
        let m = Self { c00, c01, c10, c11 };
        m.validate()?;
        Ok(m)
    }

    /// Zero diagonal, `c10 = 1`, `c01 = ratio`.
    pub fn with_ratio(ratio: f64) -> Self {
        Self { c00: 0.0, c01: ratio, c10: 1.0, c11: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c00", self.c00), ("c01", self.c01), ("c10", self.c10), ("c11", self.c11)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// `c01 / c10`, defined when `c10 > 0`.
    pub fn cost_ratio(&self) -> Option<f64> {
        (self.c10 > 0.0).then(|| self.c01 / self.c10)
    }

    pub fn cost(&self, truth: Label, predicted: Label) -> f64 {
        match (truth, predicted) {
            (Label::Fault, Label::Fault) => self.c00,
            (Label::Fault, Label::FaultFree) => self.c01,
            (Label::FaultFree, Label::Fault) => self.c10,
            (Label::FaultFree, Label::FaultFree) => self.c11,
        }
    }
}

/// How the SMO iterations are started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// SMO from `alpha = 0`.
    Smo,
    /// Interior-point estimate, rounded to the box, then SMO.
    #[default]
    InteriorSmo,
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "smo" => Ok(Solver::Smo),
            "interior_smo" => Ok(Solver::InteriorSmo),
            _ => Err(format!("unknown solver `{s}` (expected smo|interior_smo)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmHyperparams {
    /// Regularization constant.
    pub c: f64,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: f64,
    /// Cap on SMO pair updates.
    pub max_iterations: usize,
    pub cost: CostMatrix,
    pub solver: Solver,
}

impl Default for SvmHyperparams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-6,
            max_iterations: 10_000_000,
            cost: CostMatrix::default(),
            solver: Solver::default(),
        }
    }
}

impl SvmHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig(format!("C = {} must be > 0", self.c)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance = {} must be > 0", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be > 0".into()));
        }
        self.cost.validate()?;
        if self.cost.c01 <= 0.0 || self.cost.c10 <= 0.0 {
            return Err(Error::InvalidConfig("training needs c01 > 0 and c10 > 0".into()));
        }
        Ok(())
    }

    /// Per-sample box bound of the dual variable.
    fn upper_bound(&self, label: Label) -> f64 {
        self.c
            * match label {
                Label::Fault => self.cost.c01,
                Label::FaultFree => self.cost.c10,
            }
    }
}

/// Convergence record of one training run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingInfo {
    /// SMO pair updates.
    pub iterations: usize,
    /// Interior-point iterations spent on the warm start.
    pub interior_iterations: usize,
    /// Dual objective `sum(alpha) - 1/2 |w|^2` (a lower bound on the primal).
    pub dual_objective: f64,
    pub primal_objective: f64,
    pub duality_gap: f64,
    /// `max_{I_up} -y G - min_{I_low} -y G` at termination.
    pub kkt_violation: f64,
    pub n_support: usize,
    pub n_bounded: usize,
    /// Minimized dual `1/2 |w|^2 - sum(alpha)`, sampled every
    /// [`TRACE_EVERY`] iterations and at termination.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

pub const TRACE_EVERY: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: Features,
    pub bias: f64,
    /// Label scored as +1. Always `Label::Fault`.
    pub positive_class: Label,
    /// Standardization applied to raw features before scoring, if any.
    pub scaler: Option<Scaler>,
    pub hyperparams: SvmHyperparams,
    pub info: TrainingInfo,
}

fn dot(a: &Features, b: &Features) -> f64 {
    let mut s = 0.0;
    for k in 0..N_FEATURES {
        s += a[k] * b[k];
    }
    s
}

fn sign(label: Label) -> f64 {
    match label {
        Label::Fault => 1.0,
        Label::FaultFree => -1.0,
    }
}

const TAU: f64 = 1e-12;
const INTERIOR_MAX_ITERATIONS: usize = 100;
/// Relative distance to a bound below which an interior estimate is snapped.
const SNAP: f64 = 1e-6;

/// Snap near-bound values onto the bounds and restore `y'alpha = 0` by
/// moving free variables (then any variable) within their boxes.
fn round_to_box(mut alpha: Vec<f64>, y: &[f64], ub: &[f64]) -> Vec<f64> {
    for (a, &u) in alpha.iter_mut().zip(ub) {
        if !a.is_finite() || *a <= SNAP * u {
            *a = 0.0;
        } else if *a >= (1.0 - SNAP) * u {
            *a = u;
        }
    }
    let mut residual: f64 = alpha.iter().zip(y).map(|(a, y)| a * y).sum();
    for free_only in [true, false] {
        for t in 0..alpha.len() {
            if residual == 0.0 {
                return alpha;
            }
            let free = alpha[t] > 0.0 && alpha[t] < ub[t];
            if free_only && !free {
                continue;
            }
            // changing alpha_t by d changes the residual by y_t d
            let wanted = -residual * y[t];
            let d = wanted.clamp(-alpha[t], ub[t] - alpha[t]);
            alpha[t] += d;
            residual += y[t] * d;
        }
    }
    alpha
}

/// Larger free sets are left to SMO.
const MAX_CROSSOVER: usize = 4 * N_FEATURES;
const CROSSOVER_ROUNDS: usize = 5000;

/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if !(a[piv][col].abs() > 1e-12 * scale) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut out = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * out[c]).sum();
        out[r] = (b[r] - tail) / a[r][r];
    }
    Some(out)
}

/// Move along `dir` (indexed like `set`) as far as the box allows, up to a
/// full step. The first variable to hit a bound is fixed there and leaves
/// the free set.
fn step_in_box(alpha: &mut [f64], free: &mut [bool], ub: &[f64], set: &[usize], dir: &[f64], max_step: f64) {
    let mut step = max_step;
    let mut blocking = None;
    for (r, &i) in set.iter().enumerate() {
        let d = dir[r];
        let room = if d < 0.0 {
            -alpha[i] / d
        } else if d > 0.0 {
            (ub[i] - alpha[i]) / d
        } else {
            continue;
        };
        if room < step {
            step = room;
            blocking = Some(r);
        }
    }
    for (r, &i) in set.iter().enumerate() {
        alpha[i] += step * dir[r];
    }
    if let Some(r) = blocking {
        let i = set[r];
        alpha[i] = if dir[r] < 0.0 { 0.0 } else { ub[i] };
        free[i] = false;
    }
}

/// Primal active-set refinement of a feasible dual point. On a regular free
/// set the equality-constrained optimum is solved exactly (each free sample
/// on the margin, `y'alpha = 0`) and approached as far as the box allows.
/// Once there the worst bounded KKT violator enters; if that makes the free
/// set singular, a pivot along the null space (which leaves `w` and `b`
/// unchanged) runs until some variable hits a bound. The result is always
/// feasible; it is a KKT point unless the round limit or a degenerate set
/// stopped the refinement early.
fn crossover(mut alpha: Vec<f64>, x: &[Features], y: &[f64], ub: &[f64], tol: f64) -> Vec<f64> {
    let n = alpha.len();
    let mut free: Vec<bool> = (0..n).map(|t| alpha[t] > 0.0 && alpha[t] < ub[t]).collect();
    let mut entering: Option<usize> = None;
    for _ in 0..CROSSOVER_ROUNDS {
        let set: Vec<usize> = (0..n).filter(|&t| free[t]).collect();
        let m = set.len();
        if m == 0 || m > MAX_CROSSOVER {
            break;
        }
        let mut w_fixed = [0.0; N_FEATURES];
        let mut y_fixed = 0.0;
        for t in (0..n).filter(|&t| !free[t] && alpha[t] != 0.0) {
            for k in 0..N_FEATURES {
                w_fixed[k] += alpha[t] * y[t] * x[t][k];
            }
            y_fixed += y[t] * alpha[t];
        }
        // unknowns: alpha over the free set, then b
        let mut a = vec![vec![0.0; m + 1]; m + 1];
        let mut rhs = vec![0.0; m + 1];
        for (r, &i) in set.iter().enumerate() {
            for (c, &j) in set.iter().enumerate() {
                a[r][c] = y[i] * y[j] * dot(&x[i], &x[j]);
            }
            a[r][m] = y[i];
            rhs[r] = 1.0 - y[i] * dot(&x[i], &w_fixed);
            a[m][r] = y[i];
        }
        rhs[m] = -y_fixed;
        let Some(sol) = solve_dense(a, rhs).filter(|v| v.iter().all(|e| e.is_finite())) else {
            let Some(t) = entering.take() else { break };
            let Some(dir) = pivot_direction(x, y, &set, t, alpha[t] == 0.0) else { break };
            step_in_box(&mut alpha, &mut free, ub, &set, &dir, f64::INFINITY);
            continue;
        };
        entering = None;
        let dir: Vec<f64> = set.iter().enumerate().map(|(r, &i)| sol[r] - alpha[i]).collect();
        let before = free.iter().filter(|&&f| f).count();
        step_in_box(&mut alpha, &mut free, ub, &set, &dir, 1.0);
        if free.iter().filter(|&&f| f).count() < before {
            continue;
        }
        let bias = sol[m];
        let mut w = w_fixed;
        for &i in &set {
            for k in 0..N_FEATURES {
                w[k] += alpha[i] * y[i] * x[i][k];
            }
        }
        let worst = (0..n)
            .filter(|&t| !free[t])
            .map(|t| {
                let slack = y[t] * (dot(&w, &x[t]) + bias) - 1.0;
                (if alpha[t] == 0.0 { -slack } else { slack }, t)
            })
            .max_by(|p, q| p.0.total_cmp(&q.0));
        match worst {
            Some((bad, t)) if bad > 0.25 * tol => {
                free[t] = true;
                entering = Some(t);
            }
            _ => break,
        }
    }
    alpha
}

/// Direction over `set` (entering variable `t` last) with `Z'd = 0` and
/// `y'd = 0`, moving `t` up from 0 or down from its bound.
fn pivot_direction(x: &[Features], y: &[f64], set: &[usize], t: usize, up: bool) -> Option<Vec<f64>> {
    let others: Vec<usize> = set.iter().copied().filter(|&i| i != t).collect();
    if others.len() != N_FEATURES + 1 {
        return None;
    }
    let sign = if up { 1.0 } else { -1.0 };
    let mut a = vec![vec![0.0; N_FEATURES + 1]; N_FEATURES + 1];
    let mut rhs = vec![0.0; N_FEATURES + 1];
    for (c, &j) in others.iter().enumerate() {
        for k in 0..N_FEATURES {
            a[k][c] = y[j] * x[j][k];
        }
        a[N_FEATURES][c] = y[j];
    }
    for k in 0..N_FEATURES {
        rhs[k] = -sign * y[t] * x[t][k];
    }
    rhs[N_FEATURES] = -sign * y[t];
    let d = solve_dense(a, rhs)?;
    let mut it = d.into_iter();
    Some(set.iter().map(|&i| if i == t { sign } else { it.next().unwrap() }).collect())
}

/// Train on features already scaled by the caller.
pub fn train_svm(train: &Dataset, hp: &SvmHyperparams) -> Result<SvmModel> {
    hp.validate()?;
    if train.count(Label::Fault) == 0 || train.count(Label::FaultFree) == 0 {
        return Err(Error::SingleClass);
    }
    for s in &train.samples {
        Sample::new(s.features, s.label)?;
    }
    let x: Vec<Features> = train.samples.iter().map(|s| s.features).collect();
    let y: Vec<f64> = train.samples.iter().map(|s| sign(s.label)).collect();
    let ub: Vec<f64> = train.samples.iter().map(|s| hp.upper_bound(s.label)).collect();
    let (smo, interior_iterations) = match hp.solver {
        Solver::Smo => (Smo::new(&x, &y, &ub), 0),
        Solver::InteriorSmo => {
            let sol = interior::solve(&x, &y, &ub, INTERIOR_MAX_ITERATIONS);
            let alpha = round_to_box(sol.alpha, &y, &ub);
            let alpha = crossover(alpha, &x, &y, &ub, hp.tolerance);
            (Smo::with_alpha(&x, &y, &ub, alpha), sol.iterations)
        }
    };
    let (weights, bias, mut info) = smo.solve(hp.tolerance, hp.max_iterations)?;
    info.interior_iterations = interior_iterations;
    Ok(SvmModel {
        weights,
        bias,
        positive_class: Label::Fault,
        scaler: None,
        hyperparams: *hp,
        info,
    })
}

struct Smo<'a> {
    x: &'a [Features],
    y: &'a [f64],
    ub: &'a [f64],
    sq_norm: Vec<f64>,
    alpha: Vec<f64>,
    w: Features,
    grad: Vec<f64>,
}

impl<'a> Smo<'a> {
    fn new(x: &'a [Features], y: &'a [f64], ub: &'a [f64]) -> Self {
        let n = x.len();
        Self {
            x,
            y,
            ub,
            sq_norm: x.iter().map(|v| dot(v, v)).collect(),
            alpha: vec![0.0; n],
            w: [0.0; N_FEATURES],
            grad: vec![-1.0; n],
        }
    }

    fn with_alpha(x: &'a [Features], y: &'a [f64], ub: &'a [f64], alpha: Vec<f64>) -> Self {
        let mut smo = Self::new(x, y, ub);
        smo.alpha = alpha;
        smo.w = smo.weights_from_alpha();
        smo
    }

    fn weights_from_alpha(&self) -> Features {
        let mut w = [0.0; N_FEATURES];
        for t in 0..self.x.len() {
            let c = self.alpha[t] * self.y[t];
            if c != 0.0 {
                for k in 0..N_FEATURES {
                    w[k] += c * self.x[t][k];
                }
            }
        }
        w
    }

    fn in_up(&self, t: usize) -> bool {
        if self.y[t] > 0.0 {
            self.alpha[t] < self.ub[t]
        } else {
            self.alpha[t] > 0.0
        }
    }

    fn in_low(&self, t: usize) -> bool {
        if self.y[t] > 0.0 {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.ub[t]
        }
    }

    /// Refresh the gradient `G_t = y_t w.x_t - 1` and return
    /// `(i, max_{I_up} -yG, min_{I_low} -yG)`.
    fn refresh(&mut self) -> (Option<usize>, f64, f64) {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut best = None;
        for t in 0..self.x.len() {
            let g = self.y[t] * dot(&self.w, &self.x[t]) - 1.0;
            self.grad[t] = g;
            let v = -self.y[t] * g;
            if self.in_up(t) && v > gmax {
                gmax = v;
                best = Some(t);
            }
            if self.in_low(t) && v < gmin {
                gmin = v;
            }
        }
        (best, gmax, gmin)
    }

    fn select_partner(&self, i: usize, gmax: f64) -> Option<usize> {
        let mut best = None;
        let mut best_obj = f64::INFINITY;
        for t in 0..self.x.len() {
            if !self.in_low(t) {
                continue;
            }
            let b = gmax + self.y[t] * self.grad[t];
            if b <= 0.0 {
                continue;
            }
            let mut a = self.sq_norm[i] + self.sq_norm[t] - 2.0 * dot(&self.x[i], &self.x[t]);
            if a <= 0.0 {
                a = TAU;
            }
            let obj = -(b * b) / a;
            if obj < best_obj {
                best_obj = obj;
                best = Some(t);
            }
        }
        best
    }

    fn update_pair(&mut self, i: usize, j: usize) {
        let (ci, cj) = (self.ub[i], self.ub[j]);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let mut quad = self.sq_norm[i] + self.sq_norm[j] - 2.0 * dot(&self.x[i], &self.x[j]);
        if quad <= 0.0 {
            quad = TAU;
        }
        let (gi, gj) = (self.grad[i], self.grad[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if self.y[i] != self.y[j] {
            let delta = (-gi - gj) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > ci - cj {
                if ai > ci {
                    ai = ci;
                    aj = ci - diff;
                }
            } else if aj > cj {
                aj = cj;
                ai = cj + diff;
            }
        } else {
            let delta = (gi - gj) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > ci {
                if ai > ci {
                    ai = ci;
                    aj = sum - ci;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > cj {
                if aj > cj {
                    aj = cj;
                    ai = sum - cj;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = ((ai - old_i) * self.y[i], (aj - old_j) * self.y[j]);
        for k in 0..N_FEATURES {
            self.w[k] += di * self.x[i][k] + dj * self.x[j][k];
        }
    }

    fn dual_minimized(&self) -> f64 {
        0.5 * dot(&self.w, &self.w) - self.alpha.iter().sum::<f64>()
    }

    fn solve(mut self, tol: f64, max_iterations: usize) -> Result<(Features, f64, TrainingInfo)> {
        let mut trace = Vec::new();
        let mut iterations = 0;
        let violation = loop {
            let (best, gmax, gmin) = self.refresh();
            if iterations % TRACE_EVERY == 0 {
                trace.push(self.dual_minimized());
            }
            let violation = gmax - gmin;
            let Some(i) = best.filter(|_| violation > tol) else {
                break violation.max(0.0);
            };
            if iterations >= max_iterations {
                return Err(Error::NotConverged { iterations, violation });
            }
            let Some(j) = self.select_partner(i, gmax) else {
                break violation.max(0.0);
            };
            self.update_pair(i, j);
            iterations += 1;
        };

        // rebuild w from alpha to shed accumulated update error
        let w = self.weights_from_alpha();
        self.w = w;
        self.refresh();
        trace.push(self.dual_minimized());

        let bias = -self.rho();
        let sum_alpha: f64 = self.alpha.iter().sum();
        let half_norm = 0.5 * dot(&w, &w);
        let hinge: f64 = (0..self.x.len())
            .map(|t| self.ub[t] * (1.0 - self.y[t] * (dot(&w, &self.x[t]) + bias)).max(0.0))
            .sum();
        let primal = half_norm + hinge;
        let dual = sum_alpha - half_norm;
        let info = TrainingInfo {
            iterations,
            interior_iterations: 0,
            dual_objective: dual,
            primal_objective: primal,
            duality_gap: primal - dual,
            kkt_violation: violation,
            n_support: self.alpha.iter().filter(|&&a| a > 0.0).count(),
            n_bounded: (0..self.x.len()).filter(|&t| self.alpha[t] >= self.ub[t]).count(),
            objective_trace: trace,
        };
        Ok((w, bias, info))
    }

    /// Offset such that `w.x - rho` is the decision value: the mean of
    /// `y G` over free variables, or the midpoint of the feasible interval.
    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut n_free, mut sum_free) = (0usize, 0.0);
        for t in 0..self.x.len() {
            let yg = self.y[t] * self.grad[t];
            if self.alpha[t] >= self.ub[t] {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.alpha[t] <= 0.0 {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

impl SvmModel {
    /// `w.x + b` on an already scaled sample; positive means fault-like.
    pub fn decision_score(&self, sample: &Sample) -> f64 {
        self.score_features(&sample.features)
    }

    pub fn score_features(&self, x: &Features) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Score a raw (unscaled) sample, applying the attached scaler if any.
    pub fn score_raw(&self, sample: &Sample) -> f64 {
        match &self.scaler {
            Some(sc) => self.score_features(&sc.transform(&sample.features)),
            None => self.score_features(&sample.features),
        }
    }

    /// Fault iff the score reaches `threshold`.
    pub fn predict(&self, sample: &Sample, threshold: f64) -> Label {
        label_at(self.decision_score(sample), threshold)
    }

    pub fn scores(&self, dataset: &Dataset) -> Vec<f64> {
        dataset.samples.iter().map(|s| self.decision_score(s)).collect()
    }
}

/// Thresholding rule shared by prediction and curve sweeps.
pub fn label_at(score: f64, threshold: f64) -> Label {
    if score >= threshold {
        Label::Fault
    } else {
        Label::FaultFree
    }
}

pub fn decision_score(model: &SvmModel, sample: &Sample) -> f64 {
    model.decision_score(sample)
}

pub fn predict(model: &SvmModel, sample: &Sample, threshold: f64) -> Label {
    model.predict(sample, threshold)
}

/// On-disk form of a model: one flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelRecord {
    positive_class: Label,
    weights: Features,
    bias: f64,
    scaler_mean: Option<Features>,
    scaler_std: Option<Features>,
    c: f64,
    c00: f64,
    c01: f64,
    c10: f64,
    c11: f64,
    tolerance: f64,
    max_iterations: usize,
    solver: Solver,
    iterations: usize,
    interior_iterations: usize,
    dual_objective: f64,
    primal_objective: f64,
    duality_gap: f64,
    kkt_violation: f64,
    n_support: usize,
    n_bounded: usize,
}

impl SvmModel {
    pub fn to_json(&self) -> String {
        let hp = &self.hyperparams;
        let info = &self.info;
        let rec = ModelRecord {
            positive_class: self.positive_class,
            weights: self.weights,
            bias: self.bias,
            scaler_mean: self.scaler.as_ref().map(|s| s.mean),
            scaler_std: self.scaler.as_ref().map(|s| s.std),
            c: hp.c,
            c00: hp.cost.c00,
            c01: hp.cost.c01,
            c10: hp.cost.c10,
            c11: hp.cost.c11,
            tolerance: hp.tolerance,
            max_iterations: hp.max_iterations,
            solver: hp.solver,
            iterations: info.iterations,
            interior_iterations: info.interior_iterations,
            dual_objective: info.dual_objective,
            primal_objective: info.primal_objective,
            duality_gap: info.duality_gap,
            kkt_violation: info.kkt_violation,
            n_support: info.n_support,
            n_bounded: info.n_bounded,
        };
        let mut s = serde_json::to_string_pretty(&rec).expect("model record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let rec: ModelRecord = serde_json::from_str(text)?;
        let scaler = match (rec.scaler_mean, rec.scaler_std) {
            (Some(mean), Some(std)) => Some(Scaler { mean, std }),
            _ => None,
        };
        Ok(SvmModel {
            weights: rec.weights,
            bias: rec.bias,
            positive_class: rec.positive_class,
            scaler,
            hyperparams: SvmHyperparams {
                c: rec.c,
                tolerance: rec.tolerance,
                max_iterations: rec.max_iterations,
                cost: CostMatrix { c00: rec.c00, c01: rec.c01, c10: rec.c10, c11: rec.c11 },
                solver: rec.solver,
            },
            info: TrainingInfo {
                iterations: rec.iterations,
                interior_iterations: rec.interior_iterations,
                dual_objective: rec.dual_objective,
                primal_objective: rec.primal_objective,
                duality_gap: rec.duality_gap,
                kkt_violation: rec.kkt_violation,
                n_support: rec.n_support,
                n_bounded: rec.n_bounded,
                objective_trace: Vec::new(),
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|source| Error::Model { path: path.to_path_buf(), source })
    }
}
