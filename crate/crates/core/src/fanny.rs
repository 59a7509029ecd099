//! Fuzzy analysis (FANNY) memberships computed directly from dissimilarities.
//!
//! Minimises
//!
//! ```text
//! F(U) = sum_v  sum_{i,j} u_iv^r u_jv^r d_ij / (2 sum_j u_jv^r)
//! ```
//!
//! over row-stochastic `U`. With `w_jv = u_jv^r`, `B_v = sum_j w_jv` and
//! `A_v = sum_ij w_iv w_jv d_ij`, the partial derivative is
//! `dF/du_iv = r u_iv^(r-1) a_iv` where
//! `a_iv = sum_j w_jv d_ij / B_v - A_v / (2 B_v^2)`.
//!
//! Holding every `a_iv` fixed, the row minimiser of `sum_v a_iv u_iv^r` on the
//! simplex is `u_iv ∝ a_iv^(-1/(r-1))`. That function is convex in the row and
//! its gradient at the current row is exactly `dF/du_i`, so the move towards
//! the row minimiser is a descent direction for `F`. Each iteration takes that
//! move for all rows and halves the step until `F` does not increase, which
//! keeps the objective monotone and rows on the simplex.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::certainty::{CertaintyMatrix, MeasureKind};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_MEMBERSHIP_EXPONENT: f64 = 2.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 500;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FannyOptions {
    /// Membership exponent, must exceed 1. Larger values give fuzzier memberships.
    pub r: f64,
    pub seed: u64,
    /// Stop when the relative objective decrease falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FannyOptions {
    fn default() -> Self {
        Self {
            r: DEFAULT_MEMBERSHIP_EXPONENT,
            seed: 0,
            tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FannyResult {
    pub memberships: CertaintyMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub r: f64,
    /// Objective after initialisation and after every iteration.
    pub history: Vec<f64>,
}

impl FannyResult {
    /// Nearest crisp clustering (largest membership, smallest index on ties).
    pub fn hard_labels(&self) -> Vec<usize> {
        self.memberships.argmax_labels()
    }
}

/// Value of the fuzzy objective for row-major memberships `u` (`n x c`).
pub fn fanny_objective(m: &DissimilarityMatrix, u: &[f64], c: usize, r: f64) -> f64 {
    let n = m.n();
    let w: Vec<f64> = u.iter().map(|x| x.powf(r)).collect();
    (0..c)
        .map(|v| {
            let b: f64 = (0..n).map(|j| w[j * c + v]).sum();
            if b == 0.0 {
                return 0.0;
            }
            let a: f64 = (0..n)
                .map(|i| {
                    let wi = w[i * c + v];
                    wi * m.row(i).iter().enumerate().map(|(j, d)| w[j * c + v] * d).sum::<f64>()
                })
                .sum();
            a / (2.0 * b)
        })
        .sum()
}

/// Row minimisers `u_iv ∝ a_iv^(-1/(r-1))` for the current memberships.
fn proposal(m: &DissimilarityMatrix, u: &[f64], c: usize, r: f64) -> Vec<f64> {
    let n = m.n();
    let w: Vec<f64> = u.iter().map(|x| x.powf(r)).collect();
    let mut t = vec![0.0; n * c];
    for i in 0..n {
        let row = m.row(i);
        for v in 0..c {
            t[i * c + v] = row.iter().enumerate().map(|(j, d)| w[j * c + v] * d).sum();
        }
    }
    let mut b = vec![0.0; c];
    let mut a_tot = vec![0.0; c];
    for v in 0..c {
        b[v] = (0..n).map(|j| w[j * c + v]).sum();
        a_tot[v] = (0..n).map(|i| w[i * c + v] * t[i * c + v]).sum();
    }

    let power = 1.0 / (r - 1.0);
    let mut out = vec![0.0; n * c];
    let mut grad = vec![0.0; c];
    for i in 0..n {
        for v in 0..c {
            grad[v] = if b[v] > 0.0 {
                t[i * c + v] / b[v] - a_tot[v] / (2.0 * b[v] * b[v])
            } else {
                0.0
            };
        }
        let row = &mut out[i * c..(i + 1) * c];
        let scale = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
        let floor = 1e-14 * scale.max(f64::MIN_POSITIVE);
        let flat = grad.iter().filter(|&&g| g <= floor).count();
        if flat > 0 {
            for (o, &g) in row.iter_mut().zip(&grad) {
                *o = if g <= floor { 1.0 / flat as f64 } else { 0.0 };
            }
            continue;
        }
        let low = grad.iter().copied().fold(f64::INFINITY, f64::min);
        for (o, &g) in row.iter_mut().zip(&grad) {
            *o = (-(g / low).ln() * power).exp();
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|o| *o /= s);
    }
    out
}

fn dirichlet_start(n: usize, c: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..n * c).map(|_| Exp1.sample(&mut rng)).collect();
    for row in u.chunks_exact_mut(c) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    u
}

pub fn fanny(m: &DissimilarityMatrix, c: usize, opts: &FannyOptions) -> Result<FannyResult> {
    fanny_from(m, c, opts, dirichlet_start(m.n(), c, opts.seed))
}

/// FANNY iterations from caller-supplied starting memberships.
pub fn fanny_from(m: &DissimilarityMatrix, c: usize, opts: &FannyOptions, start: Vec<f64>) -> Result<FannyResult> {
    let n = m.n();
    if !(opts.r > 1.0 && opts.r.is_finite()) {
        return Err(Error::Argument(format!(
            "membership exponent must exceed 1, got {}",
            opts.r
        )));
    }
    if c < 2 || c > n {
        return Err(Error::Argument(format!("cluster count {c} must lie in 2..={n}")));
    }
    if start.len() != n * c {
        return Err(Error::Dimension("starting memberships have the wrong shape".into()));
    }
    let r = opts.r;
    let mut u = start;
    let mut f = fanny_objective(m, &u, c, r);
    let mut history = vec![f];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let target = proposal(m, &u, c, r);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&target).map(|(a, b)| a + step * (b - a)).collect();
            let ft = fanny_objective(m, &trial, c, r);
            if ft <= f {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((next, f_next)) = accepted else {
            // No step decreases F at working precision.
            converged = true;
            break;
        };
        let decrease = f - f_next;
        debug_assert!(decrease >= 0.0);
        u = next;
        f = f_next;
        history.push(f);
        if decrease <= opts.tol * f.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    let memberships = CertaintyMatrix::from_rows(MeasureKind::Fanny, r, n, c, u)?;
    Ok(FannyResult {
        memberships,
        objective: f,
        iterations,
        converged,
        r,
        history,
    })
}
