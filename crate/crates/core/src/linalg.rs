//! Small dense helpers shared by the spectral estimators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Above this size the spectral estimators switch from a direct null-space
/// solve to power iteration.
pub(crate) const DIRECT_SOLVE_MAX: usize = 64;

/// Solves `a x = 0` for a rank `n - 1` matrix whose rows sum to the zero
/// vector, pinning `Σ x = 1` in place of the last equation.
pub(crate) fn null_vector(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = a.nrows();
    let mut sys = a.clone();
    for j in 0..n {
        sys[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    sys.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("singular system in null-space solve"))
}

/// Iterates `x <- (x + a x) / 2` from `start`, rescaling each step to unit
/// max-norm unless `keep_scale`. Returns the iterate and step count, or the
/// last iterate with `converged = false`.
///
/// Halving with the identity keeps the spectrum's unit eigenvalue and pulls
/// every other unit-modulus eigenvalue strictly inside the circle, so periodic
/// chains converge too.
pub(crate) fn lazy_power(
    a: &DMatrix<f64>,
    start: DVector<f64>,
    tol: f64,
    max_iter: usize,
    keep_scale: bool,
) -> (DVector<f64>, usize, bool) {
    let mut x = start;
    for it in 1..=max_iter {
        let mut next = (&x + a * &x) * 0.5;
        if !keep_scale {
            let s = next.amax();
            if s > 0.0 {
                next /= s;
            }
        }
        let scale = next.amax().max(f64::MIN_POSITIVE);
        let step = (&next - &x).amax() / scale;
        x = next;
        if step <= tol {
            return (x, it, true);
        }
    }
    (x, max_iter, false)
}

/// `‖a x − λ x‖∞ / ‖x‖∞`.
pub(crate) fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, lambda: f64) -> f64 {
    let r = a * x - x * lambda;
    r.amax() / x.amax().max(f64::MIN_POSITIVE)
}
