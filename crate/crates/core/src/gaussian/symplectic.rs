use nalgebra::DMatrix;

/// Maximum `|S Omega S^T - Omega|` (Frobenius) accepted for a symplectic matrix.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-9;

/// `Omega = diag([[0, 1], [-1, 0]], ...)` over `modes` modes in xp-pair ordering.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Frobenius norm of `S Omega S^T - Omega`. Infinite for odd or non-square `s`.
pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    if !s.is_square() || !s.nrows().is_multiple_of(2) {
        return f64::INFINITY;
    }
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).norm()
}
