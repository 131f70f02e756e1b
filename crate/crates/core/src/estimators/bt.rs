//! Maximum-likelihood Bradley-Terry fitting and its diagnostics.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;
use crate::ratings::{Normalization, RatingVector};

/// Settings for [`fit_bt`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    /// Starting strengths; uniform when `None`.
    pub init: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            normalization: Normalization::LastItem,
            init: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub ratings: RatingVector,
    pub log_likelihood: f64,
    pub entropy: f64,
    /// Observed minus expected wins per item.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl FitReport {
    /// Fitted `p̂_ij` for every ordered pair (zero on the diagonal).
    pub fn probabilities(&self) -> DMatrix<f64> {
        probability_matrix(&self.ratings.values)
    }

    /// Canonical parameter `θ_ij = log(p_ij / (1 - p_ij)) = λ_i - λ_j`.
    pub fn canonical_parameter(&self, i: usize, j: usize) -> f64 {
        self.ratings.values[i].ln() - self.ratings.values[j].ln()
    }
}

pub(crate) fn probability_matrix(values: &[f64]) -> DMatrix<f64> {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            values[i] / (values[i] + values[j])
        }
    })
}

fn check_dims(c: &ComparisonMatrix, r: &RatingVector) -> Result<()> {
    if c.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            actual: r.len(),
        });
    }
    Ok(())
}

/// Fits Bradley-Terry strengths by the minorization-maximization fixed point
/// `π_i <- w_i / Σ_j m_ij / (π_i + π_j)`.
///
/// Stops once the largest relative parameter change and the largest
/// retrodictive residual are both within `tol`. Running out of iterations is
/// not an error: the report comes back with `converged = false`.
pub fn fit_bt(c: &ComparisonMatrix, opts: &FitOptions) -> Result<FitReport> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    c.require_irreducible()?;
    let n = c.len();
    let m = c.match_matrix();
    let wins = c.wins().values;

    let mut pi = match &opts.init {
        Some(init) => {
            if init.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: init.len(),
                });
            }
            if init.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::invalid("initial strengths must be positive"));
            }
            init.clone()
        }
        None => vec![1.0; n],
    };
    rescale_geomean(&mut pi);

    let mut next = vec![0.0; n];
    let mut residuals = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        for i in 0..n {
            let denom: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| m[(i, j)] / (pi[i] + pi[j]))
                .sum();
            next[i] = wins[i] / denom;
        }
        rescale_geomean(&mut next);
        let change = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| ((b - a) / a).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        residuals_into(&m, &wins, &pi, &mut residuals);
        let worst = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
        if change <= opts.tol && worst <= opts.tol {
            converged = true;
            break;
        }
    }

    let ratings = RatingVector::new(c.items().to_vec(), pi, &opts.normalization)?;
    Ok(FitReport {
        log_likelihood: log_likelihood(c, &ratings)?,
        entropy: entropy(c, &ratings)?,
        residuals,
        iterations,
        converged,
        tol: opts.tol,
        max_iter: opts.max_iter,
        ratings,
    })
}

fn rescale_geomean(v: &mut [f64]) {
    let g = (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp();
    for x in v.iter_mut() {
        *x /= g;
    }
}

fn residuals_into(m: &DMatrix<f64>, wins: &[f64], pi: &[f64], out: &mut [f64]) {
    let n = pi.len();
    for i in 0..n {
        let expected: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| m[(i, j)] * pi[i] / (pi[i] + pi[j]))
            .sum();
        out[i] = wins[i] - expected;
    }
}

/// `Σ_{i≠j} c_ij log p_ij`, the binomial log-likelihood without its constant.
pub fn log_likelihood(c: &ComparisonMatrix, ratings: &RatingVector) -> Result<f64> {
    check_dims(c, ratings)?;
    let v = &ratings.values;
    let n = c.len();
    let mut ll = 0.0;
    for i in 0..n {
        for j in 0..n {
            let cij = c.get(i, j);
            if i != j && cij > 0.0 {
                ll += cij * (v[i] / (v[i] + v[j])).ln();
            }
        }
    }
    Ok(ll)
}

/// Observed wins minus expected wins, `w_i - Σ_j m_ij p_ij`.
pub fn retrodictive_residuals(c: &ComparisonMatrix, ratings: &RatingVector) -> Result<Vec<f64>> {
    check_dims(c, ratings)?;
    let mut out = vec![0.0; c.len()];
    residuals_into(
        &c.match_matrix(),
        &c.wins().values,
        &ratings.values,
        &mut out,
    );
    Ok(out)
}

/// Entropy of the match outcomes under `ratings`.
pub fn entropy(c: &ComparisonMatrix, ratings: &RatingVector) -> Result<f64> {
    check_dims(c, ratings)?;
    Ok(pairwise_entropy(
        &c.match_matrix(),
        &probability_matrix(&ratings.values),
    ))
}

/// `-Σ_{i<j} m_ij (p_ij log p_ij + (1 - p_ij) log(1 - p_ij))` for an arbitrary
/// probability matrix; only the upper triangle of `p` is read.
pub fn pairwise_entropy(m: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let pij = p[(i, j)];
            s -= m[(i, j)] * (xlogx(pij) + xlogx(1.0 - pij));
        }
    }
    s
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
