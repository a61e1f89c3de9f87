//! Conjugate gradients for `min_{V ∈ span(S)} ‖y − A V‖²`.

use super::config::SubspaceProjection;
use super::step::restricted_projection;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SubspaceBasis};
use crate::operators::LinearOperator;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LeastSquaresOutcome<T> {
    pub solution: DenseMatrix<T>,
    pub iterations: usize,
    /// `‖P_S A*(y − A V)‖_F` at the returned iterate.
    pub projected_residual: f64,
    pub converged: bool,
    /// CG met a direction with (numerically) zero curvature: `A` is rank
    /// deficient on `span(S)`.
    pub rank_deficient: bool,
}

/// Solves the projected normal equations `P_S A*(A V − y) = 0` over
/// `V ∈ span(S)`, stopping when the projected residual drops to
/// `cg_tol · max(1, ‖y‖)` or after `cg_maxiter` iterations.
pub fn restricted_least_squares<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    s: &SubspaceBasis<T>,
    cg_maxiter: usize,
    cg_tol: f64,
) -> Result<LeastSquaresOutcome<T>> {
    restricted_least_squares_from(op, y, s, None, cg_maxiter, cg_tol, SubspaceProjection::ExactTwoSided)
}

/// As [`restricted_least_squares`], warm-started at `P_S warm`.
pub fn restricted_least_squares_from<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    s: &SubspaceBasis<T>,
    warm: Option<&DenseMatrix<T>>,
    cg_maxiter: usize,
    cg_tol: f64,
    mode: SubspaceProjection,
) -> Result<LeastSquaresOutcome<T>> {
    if s.is_empty() {
        return Err(Error::InvalidInput("least squares over an empty subspace".into()));
    }
    op.check_measurements(y)?;
    let s = if mode == SubspaceProjection::ExactTwoSided && !s.is_strict() {
        s.orthonormalized()
    } else {
        s.clone()
    };
    let (m, n) = s.dims();
    let proj = |z: &DenseMatrix<T>| restricted_projection(&s, z, mode);
    let normal = |z: &DenseMatrix<T>| -> Result<DenseMatrix<T>> { proj(&op.adjoint(&op.apply(z)?)?) };
    let true_residual = |v: &DenseMatrix<T>| -> Result<DenseMatrix<T>> {
        let ax = op.apply(v)?;
        let r: Vec<T> = y.iter().zip(&ax).map(|(&a, &b)| a - b).collect();
        proj(&op.adjoint(&r)?)
    };

    let y_norm = crate::linalg::norm(y).to_f64_lossy();
    let threshold = cg_tol * y_norm.max(1.0);

    let mut v = match warm {
        Some(w) => proj(w)?,
        None => DenseMatrix::zeros(m, n),
    };
    let mut r = true_residual(&v)?;
    let mut p = r.clone();
    let mut rs = r.frobenius_norm_sq();
    let mut iterations = 0;
    let mut rank_deficient = false;

    while iterations < cg_maxiter {
        if rs.to_f64_lossy().sqrt() <= threshold {
            break;
        }
        let ap = normal(&p)?;
        let curv = p.dot(&ap);
        if !(curv > T::epsilon() * T::epsilon() * p.frobenius_norm_sq()) {
            rank_deficient = true;
            break;
        }
        let alpha = rs / curv;
        v.axpy(alpha, &p);
        iterations += 1;
        if iterations % 50 == 0 {
            r = true_residual(&v)?;
        } else {
            r.axpy(-alpha, &ap);
        }
        let rs_new = r.frobenius_norm_sq();
        let beta = rs_new / rs;
        rs = rs_new;
        p.scale_in_place(beta);
        p.axpy(T::one(), &r);
    }

    let projected_residual = true_residual(&v)?.frobenius_norm().to_f64_lossy();
    if !v.is_finite() {
        return Err(Error::NonFinite("least-squares iterate"));
    }
    Ok(LeastSquaresOutcome {
        solution: v,
        iterations,
        projected_residual,
        converged: projected_residual <= threshold,
        rank_deficient,
    })
}
