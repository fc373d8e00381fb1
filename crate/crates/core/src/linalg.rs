//! Small dense linear-algebra helpers.
//!
//! Matrices in this crate are tiny (teams of a few dozen agents, games of a
//! few dimensions), so everything is dense and allocation-light.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;

/// Size up to which [`spectral_radius`] uses a full eigen-decomposition.
pub const DENSE_EIGEN_LIMIT: usize = 64;

/// Relative tolerance targeted by the eigenvalue routines.
pub const EIGEN_TOL: f64 = 1e-9;

/// Largest absolute eigenvalue of a square matrix.
///
/// Up to [`DENSE_EIGEN_LIMIT`] rows the eigenvalues come from a real Schur
/// decomposition. Larger matrices, and the rare Schur iteration that does not
/// converge, fall back to [`power_iteration_radius`].
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid(format!(
            "spectral radius needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    if m.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    if n <= DENSE_EIGEN_LIMIT {
        if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
            let eig = schur.complex_eigenvalues();
            return Ok(eig.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(power_iteration_radius(m, 200_000))
}

/// Spectral radius estimate by power iteration on `m²`.
///
/// Iterating with the square makes a dominant `±λ` pair converge. Intended
/// for the matrices this crate produces (symmetric, or nonnegative with a
/// positive diagonal); complex dominant pairs converge only in the averaged
/// sense.
pub fn power_iteration_radius(m: &Matrix, max_iter: usize) -> f64 {
    let n = m.nrows();
    let mut x = nalgebra::DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_75).fract());
    let norm = x.norm();
    x /= norm;
    let mut estimate = 0.0_f64;
    for _ in 0..max_iter {
        let y = m * &x;
        let z = m * &y;
        let growth = z.norm();
        if growth == 0.0 {
            return 0.0;
        }
        let next = growth.sqrt();
        x = z / growth;
        if (next - estimate).abs() <= 1e-14 * next.max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// `m - (1/n) 1 1ᵀ`.
pub fn minus_averaging(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let avg = 1.0 / n as f64;
    m.map(|v| v - avg)
}
