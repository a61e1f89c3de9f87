//! Gram–Schmidt orthonormalization of column sets.

use super::matrix::{axpy, dot, norm, DenseMatrix};
use crate::scalar::Scalar;

/// Splits a matrix into its columns.
pub(crate) fn columns_of<T: Scalar>(m: &DenseMatrix<T>) -> Vec<Vec<T>> {
    let t = m.transpose();
    (0..t.rows()).map(|j| t.row(j).to_vec()).collect()
}

/// Assembles a `rows x cols.len()` matrix from columns.
pub(crate) fn from_columns<T: Scalar>(rows: usize, cols: &[Vec<T>]) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Removes the components of `v` along the orthonormal `basis`, two passes.
pub(crate) fn project_out<T: Scalar>(basis: &[Vec<T>], v: &mut [T]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Appends `v` to `basis` if it carries a direction not already spanned.
///
/// Returns `true` when a column was added.
pub(crate) fn push_orthonormal<T: Scalar>(basis: &mut Vec<Vec<T>>, mut v: Vec<T>) -> bool {
    let original = norm(&v);
    if original == T::zero() || !original.is_finite() {
        return false;
    }
    project_out(basis, &mut v);
    let residual = norm(&v);
    if residual <= T::rank_tol() * original {
        return false;
    }
    let inv = residual.recip();
    v.iter_mut().for_each(|x| *x *= inv);
    // a third pass if cancellation was severe
    if residual < T::of(1e-3) * original {
        project_out(basis, &mut v);
        let r = norm(&v);
        let inv = r.recip();
        v.iter_mut().for_each(|x| *x *= inv);
    }
    basis.push(v);
    true
}

/// Orthonormal basis for the column range of `m`, dropping dependent columns.
pub fn orthonormal_columns<T: Scalar>(m: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut basis = Vec::with_capacity(m.cols());
    for c in columns_of(m) {
        push_orthonormal(&mut basis, c);
    }
    from_columns(m.rows(), &basis)
}

/// Extends the orthonormal columns of `q` to `target` columns with
/// coordinate directions projected against the existing ones.
pub fn complete_basis<T: Scalar>(q: &DenseMatrix<T>, target: usize) -> DenseMatrix<T> {
    let rows = q.rows();
    assert!(target <= rows, "cannot complete beyond the ambient dimension");
    let mut basis = columns_of(q);
    let mut e = 0;
    while basis.len() < target && e < rows {
        let mut v = vec![T::zero(); rows];
        v[e] = T::one();
        push_orthonormal(&mut basis, v);
        e += 1;
    }
    from_columns(rows, &basis)
}

/// `max |QᵀQ − I|` over all entries.
pub fn orthonormality_error<T: Scalar>(q: &DenseMatrix<T>) -> T {
    let g = q.t_matmul(q);
    let mut worst = T::zero();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}
