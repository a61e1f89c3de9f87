//! Dense linear algebra: matrices, SVD backends, and the subspace projection calculus.

mod basis;
mod matrix;
mod ortho;
mod svd;

pub use basis::{best_rank_k, SubspaceBasis};
pub use matrix::DenseMatrix;
pub use ortho::{complete_basis, orthonormal_columns, orthonormality_error};
pub use svd::{svd, truncated_svd, SvdFactors};

pub(crate) use matrix::{dot, norm};

/// Number of singular values of `x` above `tol`.
pub fn numerical_rank<T: crate::Scalar>(x: &DenseMatrix<T>, tol: T) -> crate::Result<usize> {
    Ok(svd(x)?.sigma.iter().filter(|&&s| s > tol).count())
}
