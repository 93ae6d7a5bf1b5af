//! Sparse matrices and the symmetric eigensolvers behind every spectral norm.

mod dense;
mod lanczos;
mod sparse;
mod tridiagonal;

pub use dense::{dense_spectral_norm, dense_symmetric_eigenvalues};
pub use lanczos::{extreme_eigenvalues, EigenOptions, Extremes};
pub use sparse::{Bipartite, SparseMatrix, SymmetricOperator};
pub use tridiagonal::tridiagonal_eigen;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("eigensolver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix dimension {dim} exceeds the cap {cap}")]
    TooLarge { dim: usize, cap: usize },
}

/// Largest dimension accepted by [`spectral_norm`].
pub const SPECTRAL_DIM_CAP: usize = 1 << 15;

/// Largest singular value. Symmetric square matrices are handled directly;
/// anything else through the bipartite embedding `[[0, M], [Mᵀ, 0]]`.
pub fn spectral_norm<T: Real>(m: &SparseMatrix<T>) -> Result<T, LinalgError> {
    spectral_norm_with(m, &EigenOptions::default())
}

pub fn spectral_norm_with<T: Real>(m: &SparseMatrix<T>, opts: &EigenOptions<T>) -> Result<T, LinalgError> {
    let dim = m.rows().max(m.cols());
    if dim > SPECTRAL_DIM_CAP {
        return Err(LinalgError::TooLarge { dim, cap: SPECTRAL_DIM_CAP });
    }
    if m.nnz() == 0 {
        return Ok(T::ZERO);
    }
    let ext = if m.rows() == m.cols() && m.is_symmetric() {
        extreme_eigenvalues(m, opts)?
    } else {
        let t = m.transpose();
        extreme_eigenvalues(&Bipartite::new(m, &t), opts)?
    };
    Ok(ext.min.abs().max(ext.max.abs()))
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::ZERO, |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
