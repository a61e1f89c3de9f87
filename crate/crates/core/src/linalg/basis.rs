//! Sets of orthonormal rank-1 matrices and the projections they induce.

use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use super::ortho::{orthonormal_columns, orthonormality_error};
use super::svd::truncated_svd;
use crate::error::{mismatch, Result};
use crate::scalar::Scalar;

/// A subspace of `R^{m x n}` described by a left factor `U` (`m x r_left`)
/// and a right factor `V` (`n x r_right`).
///
/// The projection onto the subspace is
/// `P_S X = U Uᵀ X + X V Vᵀ − U Uᵀ X V Vᵀ`. Bases produced by a single SVD
/// pair columns as rank-1 atoms `u_i v_iᵀ`; bases produced by
/// [`SubspaceBasis::ortho_union`] may have different left and right ranks and
/// only the two column spans matter. `strict_orthonormal` records whether both
/// factors have orthonormal columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceBasis<T> {
    left: DenseMatrix<T>,
    right: DenseMatrix<T>,
    strict_orthonormal: bool,
}

impl<T: Scalar> SubspaceBasis<T> {
    /// The empty set; spans only the zero matrix.
    pub fn empty(m: usize, n: usize) -> Self {
        Self {
            left: DenseMatrix::zeros(m, 0),
            right: DenseMatrix::zeros(n, 0),
            strict_orthonormal: true,
        }
    }

    /// Wraps factors with orthonormal columns, checking orthonormality to `1e-10`.
    pub fn from_orthonormal(left: DenseMatrix<T>, right: DenseMatrix<T>) -> Result<Self> {
        let tol = T::of(1e-10).max(T::epsilon() * T::of(100.0));
        let strict = (left.cols() == 0 || orthonormality_error(&left) <= tol)
            && (right.cols() == 0 || orthonormality_error(&right) <= tol);
        if !strict {
            return Err(crate::Error::InvalidInput(
                "factors are not column-orthonormal".into(),
            ));
        }
        Ok(Self {
            left,
            right,
            strict_orthonormal: true,
        })
    }

    pub(crate) fn from_parts(left: DenseMatrix<T>, right: DenseMatrix<T>, strict: bool) -> Self {
        Self {
            left,
            right,
            strict_orthonormal: strict,
        }
    }

    pub fn left(&self) -> &DenseMatrix<T> {
        &self.left
    }

    pub fn right(&self) -> &DenseMatrix<T> {
        &self.right
    }

    pub fn is_strict(&self) -> bool {
        self.strict_orthonormal
    }

    pub fn left_rank(&self) -> usize {
        self.left.cols()
    }

    pub fn right_rank(&self) -> usize {
        self.right.cols()
    }

    /// `max(r_left, r_right)`; zero for the empty set.
    pub fn rank(&self) -> usize {
        self.left.cols().max(self.right.cols())
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    /// Ambient `(m, n)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.left.rows(), self.right.rows())
    }

    fn check(&self, x: &DenseMatrix<T>) -> Result<()> {
        if self.dims() != x.shape() {
            let (m, n) = self.dims();
            return Err(mismatch(
                format!("{m}x{n}"),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            let (m, n) = self.dims();
            let (p, q) = other.dims();
            return Err(mismatch(format!("{m}x{n} basis"), format!("{p}x{q} basis")));
        }
        Ok(())
    }

    /// `P_S X`. For non-strict bases the same formula is applied to the raw
    /// factors, which is a pseudo-projection.
    pub fn project(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(x)?;
        if self.is_empty() {
            return Ok(DenseMatrix::zeros(x.rows(), x.cols()));
        }
        let (u, v) = (&self.left, &self.right);
        // U (UᵀX) + (XV − U(UᵀX)V) Vᵀ
        let utx = u.t_matmul(x);
        let mut out = u.matmul(&utx);
        if v.cols() > 0 {
            let mut xv = x.matmul(v);
            if u.cols() > 0 {
                xv.axpy(-T::one(), &u.matmul(&utx.matmul(v)));
            }
            out.axpy(T::one(), &xv.matmul_t(v));
        }
        Ok(out)
    }

    /// `P_S⊥ X = X − P_S X`.
    pub fn project_complement(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let p = self.project(x)?;
        Ok(x - &p)
    }

    /// `P_U X = U Uᵀ X`, one matrix product.
    pub fn project_left(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(x)?;
        Ok(self.left.matmul(&self.left.t_matmul(x)))
    }

    /// `X P_V = X V Vᵀ`, one matrix product.
    pub fn project_right(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.check(x)?;
        Ok(x.matmul(&self.right).matmul_t(&self.right))
    }

    /// Returns a strictly orthonormal basis with the same column spans.
    pub fn orthonormalized(&self) -> Self {
        if self.strict_orthonormal {
            return self.clone();
        }
        Self {
            left: orthonormal_columns(&self.left),
            right: orthonormal_columns(&self.right),
            strict_orthonormal: true,
        }
    }

    /// Minimal orthonormal description of `span(S1 ∪ S2)`.
    ///
    /// Left and right spans are orthonormalized independently; their ranks may
    /// differ and neither factor is padded.
    pub fn ortho_union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_empty() {
            return Ok(other.orthonormalized());
        }
        if other.is_empty() {
            return Ok(self.orthonormalized());
        }
        Ok(Self {
            left: orthonormal_columns(&self.left.hstack(&other.left)?),
            right: orthonormal_columns(&self.right.hstack(&other.right)?),
            strict_orthonormal: true,
        })
    }

    /// Concatenates factors without re-orthogonalization.
    pub fn raw_union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        Ok(Self {
            left: self.left.hstack(&other.left)?,
            right: self.right.hstack(&other.right)?,
            strict_orthonormal: false,
        })
    }
}

/// Best rank-`k` approximation `P_k(X)` and the atom set it lives on.
pub fn best_rank_k<T: Scalar>(
    x: &DenseMatrix<T>,
    k: usize,
) -> Result<(SubspaceBasis<T>, DenseMatrix<T>)> {
    let f = truncated_svd(x, k)?;
    let approx = f.reconstruct();
    Ok((SubspaceBasis::from_parts(f.u, f.v, true), approx))
}
