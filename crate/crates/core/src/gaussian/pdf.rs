use nalgebra::DVector;

use super::covariance::CovarianceMatrix;
use crate::error::{Error, Result};

/// Largest condition number accepted for an outcome covariance.
pub const MAX_CONDITION: f64 = 1e12;

/// Log density of a zero-mean Gaussian with covariance `v` at `x`:
/// `-x^T V^{-1} x / 2 - (n log(2 pi) + log det V) / 2` with `n = dim(v)`.
///
/// For the four homodyne outcomes this is `1 / sqrt((2 pi)^4 det V)` times the
/// exponential, i.e. the normalized density.
pub fn gaussian_log_pdf(v: &CovarianceMatrix, x: &[f64]) -> Result<f64> {
    let n = v.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let eig = v.entries().symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    let chol = v
        .entries()
        .clone()
        .cholesky()
        .ok_or(Error::Singular { condition })?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let x = DVector::from_column_slice(x);
    let quad = x.dot(&chol.solve(&x));
    Ok(-0.5 * quad - 0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + log_det))
}
