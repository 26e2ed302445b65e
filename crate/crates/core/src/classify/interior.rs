//! Primal-dual interior-point method for the SVM dual
//!
//! ```text
//! min 1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a <= U,   Q = Z Z',  Z_i = y_i x_i
//! ```
//!
//! Mehrotra predictor-corrector. The Newton system `(D + Z Z') da = r` is
//! solved through Sherman-Morrison-Woodbury, so every iteration costs
//! O(n d^2) with a d x d Cholesky factorization. Only used to locate the
//! optimal face; SMO produces the certified solution.

use crate::dataio::{Features, N_FEATURES};

const D: usize = N_FEATURES;
const STEP_FRACTION: f64 = 0.995;

pub(super) struct InteriorSolution {
    pub alpha: Vec<f64>,
    pub iterations: usize,
}

/// Cholesky factor of a small SPD matrix, lower triangular.
fn cholesky(mut a: [[f64; D]; D]) -> Option<[[f64; D]; D]> {
    for j in 0..D {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= a[j][k] * a[j][k];
        }
        if !(diag > 0.0) {
            return None;
        }
        let l = diag.sqrt();
        a[j][j] = l;
        for i in j + 1..D {
            let mut v = a[i][j];
            for k in 0..j {
                v -= a[i][k] * a[j][k];
            }
            a[i][j] = v / l;
        }
        for i in 0..j {
            a[i][j] = 0.0;
        }
    }
    Some(a)
}

fn cholesky_solve(l: &[[f64; D]; D], b: &[f64; D]) -> [f64; D] {
    let mut z = *b;
    for i in 0..D {
        for k in 0..i {
            z[i] -= l[i][k] * z[k];
        }
        z[i] /= l[i][i];
    }
    for i in (0..D).rev() {
        for k in i + 1..D {
            z[i] -= l[k][i] * z[k];
        }
        z[i] /= l[i][i];
    }
    z
}

fn dot(a: &Features, b: &Features) -> f64 {
    (0..D).map(|k| a[k] * b[k]).sum()
}

struct Newton<'a> {
    x: &'a [Features],
    y: &'a [f64],
    diag: Vec<f64>,
    chol: [[f64; D]; D],
}

impl Newton<'_> {
    /// `(D + Z Z')^{-1} r`.
    fn apply_inverse(&self, r: &[f64], out: &mut [f64]) {
        let mut zt = [0.0; D];
        for i in 0..r.len() {
            let c = self.y[i] * r[i] / self.diag[i];
            for k in 0..D {
                zt[k] += c * self.x[i][k];
            }
        }
        let z = cholesky_solve(&self.chol, &zt);
        for i in 0..r.len() {
            out[i] = (r[i] - self.y[i] * dot(&self.x[i], &z)) / self.diag[i];
        }
    }
}

/// Largest step in (0, 1] keeping `value + step * delta > 0` for every
/// component, before the fraction-to-boundary factor.
fn max_step(value: &[f64], delta: &[f64], sign: f64, limit: f64) -> f64 {
    let mut step = limit;
    for (v, d) in value.iter().zip(delta) {
        let d = sign * d;
        if d < 0.0 {
            step = step.min(-v / d);
        }
    }
    step
}

pub(super) fn solve(x: &[Features], y: &[f64], ub: &[f64], max_iterations: usize) -> InteriorSolution {
    let n = x.len();
    let u_max = ub.iter().cloned().fold(0.0, f64::max);
    let mut alpha: Vec<f64> = ub.iter().map(|u| 0.5 * u).collect();
    // box slack `U - alpha`, iterated separately so it never rounds to zero
    let mut slack = alpha.clone();
    let mut v = vec![1.0; n];
    let mut u = vec![1.0; n];
    let mut b = 0.0;

    let mut rd = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut da = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];
    let mut da_aff = vec![0.0; n];
    let mut dv_aff = vec![0.0; n];
    let mut du_aff = vec![0.0; n];
    let mut ds = vec![0.0; n];

    let mut best = (f64::INFINITY, alpha.clone());
    let mut iterations = 0;
    while iterations < max_iterations {
        let mut w = [0.0; D];
        for i in 0..n {
            let c = alpha[i] * y[i];
            for k in 0..D {
                w[k] += c * x[i][k];
            }
        }
        let mut rd_max: f64 = 0.0;
        for i in 0..n {
            rd[i] = y[i] * dot(&w, &x[i]) - 1.0 + y[i] * b - v[i] + u[i];
            rd_max = rd_max.max(rd[i].abs());
        }
        let re: f64 = (0..n).map(|i| y[i] * alpha[i]).sum();
        let mu = (0..n).map(|i| alpha[i] * v[i] + slack[i] * u[i]).sum::<f64>() / (2 * n) as f64;
        // alpha + slack - U
        let rs: Vec<f64> = (0..n).map(|i| alpha[i] + slack[i] - ub[i]).collect();
        if !mu.is_finite() || !rd_max.is_finite() {
            break;
        }
        let merit = rd_max.max(mu).max(re.abs() / n as f64);
        if merit < best.0 {
            best = (merit, alpha.clone());
        } else if best.0 < 1e-6 && merit > 100.0 * best.0 {
            // roundoff has taken over
            break;
        }
        if mu < 1e-12 * (1.0 + u_max) && rd_max < 1e-8 && re.abs() < 1e-9 * (1.0 + u_max) * n as f64 {
            break;
        }
        let diag: Vec<f64> = (0..n).map(|i| v[i] / alpha[i] + u[i] / slack[i]).collect();
        let mut g = [[0.0; D]; D];
        for i in 0..n {
            let c = 1.0 / diag[i];
            for p in 0..D {
                let xp = c * x[i][p];
                for q in 0..=p {
                    g[p][q] += xp * x[i][q];
                }
            }
        }
        for p in 0..D {
            g[p][p] += 1.0;
            for q in 0..p {
                g[q][p] = g[p][q];
            }
        }
        let Some(chol) = cholesky(g) else { break };
        let newton = Newton { x, y, diag, chol };
        newton.apply_inverse(y, &mut h);
        let yh: f64 = (0..n).map(|i| y[i] * h[i]).sum();

        // solve [[M, y], [y', 0]] [da; db] = [rhs; -re]
        let solve_kkt = |rhs: &[f64], t: &mut [f64], da: &mut [f64]| -> f64 {
            newton.apply_inverse(rhs, t);
            let yt: f64 = (0..n).map(|i| y[i] * t[i]).sum();
            let db = (yt + re) / yh;
            for i in 0..n {
                da[i] = t[i] - h[i] * db;
            }
            db
        };

        // predictor
        // ds = -da - rs;  du = (target - s u - ds_aff ds_aff' + u (da + rs)) / s
        for i in 0..n {
            rhs[i] = -rd[i] - v[i] + u[i] - u[i] * rs[i] / slack[i];
        }
        solve_kkt(&rhs, &mut t, &mut da_aff);
        for i in 0..n {
            dv_aff[i] = -v[i] - v[i] * da_aff[i] / alpha[i];
            du_aff[i] = -u[i] + u[i] * (da_aff[i] + rs[i]) / slack[i];
            ds[i] = -da_aff[i] - rs[i];
        }
        let mut step = max_step(&alpha, &da_aff, 1.0, 1.0);
        step = max_step(&slack, &ds, 1.0, step);
        step = max_step(&v, &dv_aff, 1.0, step);
        step = max_step(&u, &du_aff, 1.0, step);
        let mu_aff = (0..n)
            .map(|i| {
                (alpha[i] + step * da_aff[i]) * (v[i] + step * dv_aff[i])
                    + (slack[i] + step * ds[i]) * (u[i] + step * du_aff[i])
            })
            .sum::<f64>()
            / (2 * n) as f64;
        let sigma = (mu_aff / mu).powi(3).min(1.0);
        let target = sigma * mu;

        // corrector
        for i in 0..n {
            let av = target - alpha[i] * v[i] - da_aff[i] * dv_aff[i];
            let su = target - slack[i] * u[i] - ds[i] * du_aff[i];
            rhs[i] = -rd[i] + av / alpha[i] - (su + u[i] * rs[i]) / slack[i];
        }
        let db = solve_kkt(&rhs, &mut t, &mut da);
        for i in 0..n {
            let av = target - alpha[i] * v[i] - da_aff[i] * dv_aff[i];
            let su = target - slack[i] * u[i] - ds[i] * du_aff[i];
            dv[i] = (av - v[i] * da[i]) / alpha[i];
            du[i] = (su + u[i] * (da[i] + rs[i])) / slack[i];
            ds[i] = -da[i] - rs[i];
        }
        let mut step = max_step(&alpha, &da, 1.0, f64::INFINITY);
        step = max_step(&slack, &ds, 1.0, step);
        step = max_step(&v, &dv, 1.0, step);
        step = max_step(&u, &du, 1.0, step);
        let step = (STEP_FRACTION * step).min(1.0);
        for i in 0..n {
            alpha[i] += step * da[i];
            slack[i] += step * ds[i];
            v[i] += step * dv[i];
            u[i] += step * du[i];
        }
        b += step * db;
        iterations += 1;
    }
    InteriorSolution { alpha: best.1, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves() {
        let mut a = [[0.0; D]; D];
        for i in 0..D {
            for j in 0..D {
                a[i][j] = 1.0 / (1.0 + i as f64 + j as f64);
            }
            a[i][i] += 2.0;
        }
        let l = cholesky(a).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0, 0.0, 1.0, -1.0];
        let x = cholesky_solve(&l, &b);
        for i in 0..D {
            let r: f64 = (0..D).map(|j| a[i][j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
    }
}
