//! Spectrally computed ratings: undamped PageRank, Scroogefactor, fair bets,
//! the Cesàro win-loss rating and Wei-Kendall.
//!
//! With `D` the diagonal matrix of losses (column sums of `C`):
//!
//! | method        | equation               |
//! |---------------|------------------------|
//! | PageRank      | `α = C D⁻¹ α`          |
//! | Scroogefactor | `π = D⁻¹ α_PR`         |
//! | fair bets     | `C α = D α`            |
//! | Cesàro        | `π = lim Ĉᵏ e`, `Ĉ = D⁻¹C` (Cesàro sense) |
//! | Wei-Kendall   | `α = lim (C/ρ)ᵏ e`     |
//!
//! The last three coincide with Bradley-Terry whenever `C` is quasi-symmetric.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lazy_power, null_vector, relative_residual, DIRECT_SOLVE_MAX};
use crate::matrix::ComparisonMatrix;
use crate::ratings::{Normalization, RatingVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    /// Number of raw Wei-Kendall iterates `Cᵏe` to keep.
    pub history: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            normalization: Normalization::LastItem,
            history: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub ratings: RatingVector,
    pub dominant_eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual of the method's fixed-point equation.
    pub residual: f64,
    pub iterate_history: Option<Vec<Vec<f64>>>,
}

fn check_tol(opts: &SpectralOptions) -> Result<()> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(())
}

/// Losses must all be positive and the matrix irreducible.
fn preconditions(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<Vec<f64>> {
    check_tol(opts)?;
    let losses = c.positive_losses()?;
    c.require_irreducible()?;
    Ok(losses)
}

/// `Ĉ = D⁻¹ C`.
fn win_loss_matrix(c: &ComparisonMatrix, losses: &[f64]) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |i, j| c.get(i, j) / losses[i])
}

/// Positive eigenvector of `a` for eigenvalue 1. Rows of `a - I` (or columns,
/// for column-stochastic `a`) must sum to zero.
fn unit_eigenvector(
    a: &DMatrix<f64>,
    opts: &SpectralOptions,
) -> Result<(DVector<f64>, usize, bool)> {
    let n = a.nrows();
    if n <= DIRECT_SOLVE_MAX {
        let x = null_vector(&(a - DMatrix::identity(n, n)))?;
        Ok((x, 1, true))
    } else {
        let start = DVector::from_element(n, 1.0);
        Ok(lazy_power(a, start, opts.tol, opts.max_iter, false))
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    c: &ComparisonMatrix,
    values: DVector<f64>,
    opts: &SpectralOptions,
    eigenvalue: f64,
    iterations: usize,
    converged: bool,
    residual: f64,
    history: Option<Vec<Vec<f64>>>,
) -> Result<SpectralReport> {
    // clear sign and rounding noise: the Perron vector is strictly positive
    let sign = if values.sum() < 0.0 { -1.0 } else { 1.0 };
    let values: Vec<f64> = values
        .iter()
        .map(|v| (v * sign).max(f64::MIN_POSITIVE))
        .collect();
    let ratings = RatingVector::new(c.items().to_vec(), values, &opts.normalization)?;
    Ok(SpectralReport {
        ratings,
        dominant_eigenvalue: eigenvalue,
        iterations,
        converged: converged && residual <= opts.tol,
        residual,
        iterate_history: history,
    })
}

/// Undamped PageRank: stationary distribution of the column-stochastic chain
/// `C D⁻¹`.
pub fn pagerank_undamped(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<SpectralReport> {
    let losses = preconditions(c, opts)?;
    let (alpha, it, ok, residual) = pagerank_vector(c, &losses, opts)?;
    finish(c, alpha, opts, 1.0, it, ok, residual, None)
}

fn pagerank_vector(
    c: &ComparisonMatrix,
    losses: &[f64],
    opts: &SpectralOptions,
) -> Result<(DVector<f64>, usize, bool, f64)> {
    let n = c.len();
    let p = DMatrix::from_fn(n, n, |i, j| c.get(i, j) / losses[j]);
    let (alpha, it, ok) = unit_eigenvector(&p, opts)?;
    let residual = relative_residual(&p, &alpha, 1.0);
    Ok((alpha, it, ok, residual))
}

/// PageRank divided by each item's losses, `π = D⁻¹ α_PR`.
pub fn scroogefactor(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<SpectralReport> {
    let losses = preconditions(c, opts)?;
    let (alpha, it, ok, _) = pagerank_vector(c, &losses, opts)?;
    let pi = DVector::from_fn(alpha.len(), |i, _| alpha[i] / losses[i]);
    let residual = relative_residual(&win_loss_matrix(c, &losses), &pi, 1.0);
    finish(c, pi, opts, 1.0, it, ok, residual, None)
}

/// Fair-bets rating: the loser pays `α_loser` to the winner and every item's
/// net takings are zero, `Σ_j c_ij α_j = (Σ_j c_ji) α_i`.
pub fn fair_bets(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<SpectralReport> {
    let losses = preconditions(c, opts)?;
    let n = c.len();
    // balance matrix C - D: its columns sum to zero
    let balance = DMatrix::from_fn(n, n, |i, j| if i == j { -losses[i] } else { c.get(i, j) });
    let (alpha, it, ok) = if n <= DIRECT_SOLVE_MAX {
        (null_vector(&balance)?, 1, true)
    } else {
        lazy_power(
            &win_loss_matrix(c, &losses),
            DVector::from_element(n, 1.0),
            opts.tol,
            opts.max_iter,
            false,
        )
    };
    let scale = alpha.amax().max(f64::MIN_POSITIVE);
    let residual =
        (&balance * &alpha).amax() / (scale * losses.iter().cloned().fold(0.0, f64::max));
    finish(c, alpha, opts, 1.0, it, ok, residual, None)
}

/// Row sums of the Cesàro average of `Ĉᵏ`, `lim (1/r) Σ_{k≤r} Ĉᵏ e`.
///
/// Evaluated as the limit of the lazy chain `((I + Ĉ)/2)ᵏ e`: both converge to
/// the projection of `e` onto the unit eigenvector of `Ĉ`, but the lazy powers
/// do so geometrically.
pub fn cesaro_rating(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<SpectralReport> {
    let losses = preconditions(c, opts)?;
    let chat = win_loss_matrix(c, &losses);
    let n = c.len();
    let (pi, it, ok) = lazy_power(
        &chat,
        DVector::from_element(n, 1.0),
        opts.tol,
        opts.max_iter,
        true,
    );
    let residual = relative_residual(&chat, &pi, 1.0);
    finish(c, pi, opts, 1.0, it, ok, residual, None)
}

/// Wei-Kendall iterated-wins rating `lim (C/ρ)ᵏ e`.
///
/// The raw iterates `Cᵏe` for `k = 1..=history` are kept verbatim. The limit
/// is `v (uᵀe)/(uᵀv)` with `u`, `v` the left and right Perron vectors, found by
/// power iteration on the primitive shift `I + C`.
pub fn wei_kendall(c: &ComparisonMatrix, opts: &SpectralOptions) -> Result<SpectralReport> {
    check_tol(opts)?;
    c.require_irreducible()?;
    let n = c.len();
    let cm = c.counts();

    let mut history = Vec::with_capacity(opts.history);
    let mut x = DVector::from_element(n, 1.0);
    for _ in 0..opts.history {
        x = cm * &x;
        history.push(x.iter().cloned().collect());
    }

    let start = DVector::from_element(n, 1.0);
    let (v, it_r, ok_r) = lazy_power(cm, start.clone(), opts.tol, opts.max_iter, false);
    let ct = cm.transpose();
    let (u, it_l, ok_l) = lazy_power(&ct, start, opts.tol, opts.max_iter, false);

    let rho = v.dot(&(cm * &v)) / v.dot(&v);
    let limit = &v * (u.sum() / u.dot(&v));
    let residual = relative_residual(cm, &limit, rho) / rho;
    finish(
        c,
        limit,
        opts,
        rho,
        it_r.max(it_l),
        ok_r && ok_l,
        residual,
        Some(history),
    )
}

/// Removes item `k`, redistributing its results:
/// `c'_ij = c_ij + c_ik c_kj / Σ_t c_tk`.
pub fn reduce_tournament(c: &ComparisonMatrix, k: usize) -> Result<ComparisonMatrix> {
    let n = c.len();
    if k >= n {
        return Err(Error::invalid(format!("item index {k} out of range")));
    }
    if n < 3 {
        return Err(Error::invalid("cannot reduce below two items"));
    }
    let losses_k: f64 = (0..n).map(|t| c.get(t, k)).sum();
    if losses_k <= 0.0 {
        return Err(Error::NoLosses {
            item: c.items()[k].clone(),
        });
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let rows = keep
        .iter()
        .map(|&i| {
            keep.iter()
                .map(|&j| {
                    if i == j {
                        0.0
                    } else {
                        c.get(i, j) + c.get(i, k) * c.get(k, j) / losses_k
                    }
                })
                .collect()
        })
        .collect();
    let items = keep
        .iter()
        .map(|&i| c.items()[i].clone())
        .collect::<Vec<_>>();
    ComparisonMatrix::new(items, rows)
}
