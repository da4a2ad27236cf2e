//! Covariance-matrix substrate shared by the rest of the crate.
//!
//! Conventions used throughout:
//!
//! * The vacuum covariance matrix is the identity (not `I/2` and not `hbar I/2`).
//! * Full orderings are `x, p` interleaved per mode; the symplectic form is
//!   `Omega = diag([[0, 1], [-1, 0]], ...)` in that ordering.
//! * Every change of ordering goes through a [`Permutation`]; call sites
//!   never do index arithmetic on quadratures.

mod covariance;
mod expm;
mod ordering;
mod pdf;
mod symplectic;

pub use covariance::{check_physicality, CovarianceMatrix, Physicality, PHYSICALITY_THRESHOLD};
pub use expm::matrix_exponential;
pub use ordering::{Permutation, QuadLabel, Quadrature, QuadratureOrdering};
pub use pdf::{gaussian_log_pdf, MAX_CONDITION};
pub use symplectic::{symplectic_form, symplectic_residual, SYMPLECTIC_TOLERANCE};
