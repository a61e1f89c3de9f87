//! Step sizes, momentum and the stopping rule.

use super::config::{MomentumKind, MomentumPolicy, SubspaceProjection};
use crate::error::{mismatch, Result};
use crate::linalg::{dot, DenseMatrix, SubspaceBasis};
use crate::operators::LinearOperator;
use crate::scalar::Scalar;

/// `P_S Z` evaluated per `mode`.
///
/// Non-strict (raw-union) bases are orthonormalized first in the two-sided
/// mode; the left/right inexact mode uses the raw factor as given.
pub fn restricted_projection<T: Scalar>(
    s: &SubspaceBasis<T>,
    z: &DenseMatrix<T>,
    mode: SubspaceProjection,
) -> Result<DenseMatrix<T>> {
    match mode {
        SubspaceProjection::ExactTwoSided => {
            if s.is_strict() {
                s.project(z)
            } else {
                s.orthonormalized().project(z)
            }
        }
        SubspaceProjection::LeftInexact => {
            let (m, n) = s.dims();
            if m <= n {
                s.project_left(z)
            } else {
                s.project_right(z)
            }
        }
    }
}

/// `Z − P_S Z`.
pub fn restricted_complement<T: Scalar>(
    s: &SubspaceBasis<T>,
    z: &DenseMatrix<T>,
    mode: SubspaceProjection,
) -> Result<DenseMatrix<T>> {
    Ok(z - &restricted_projection(s, z, mode)?)
}

/// Exact line-search step along an already projected gradient `pg`:
/// `μ = ‖pg‖² / ‖A pg‖²`. `None` when `pg` vanishes (or lies in the null
/// space of `A`), which the solvers treat as convergence.
pub fn line_search_step<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    pg: &DenseMatrix<T>,
) -> Result<Option<T>> {
    let num = pg.frobenius_norm_sq();
    if num == T::zero() {
        return Ok(None);
    }
    let apg = op.apply(pg)?;
    let den = dot(&apg, &apg);
    if !(den > T::zero()) || !num.is_finite() {
        return Ok(None);
    }
    Ok(Some(num / den))
}

/// `μ = ‖P_S ∇f‖²_F / ‖A P_S ∇f‖²` minimizing `f(X − (μ/2) P_S ∇f)`.
pub fn step_size_mu<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    s: &SubspaceBasis<T>,
    grad: &DenseMatrix<T>,
    mode: SubspaceProjection,
) -> Result<Option<T>> {
    let pg = restricted_projection(s, grad, mode)?;
    line_search_step(op, &pg)
}

/// Momentum step `τ_i` per `policy`.
///
/// The adaptive rule minimizes `‖y − A(X(i) + τ (X(i) − X(i−1)))‖²` using the
/// cached measurements `ax_cur = A X(i)` and `ax_prev = A X(i−1)`; it returns
/// 0 when the two coincide. The Nesterov rule advances `alpha_state`.
pub fn momentum_tau<T: Scalar>(
    policy: &MomentumPolicy,
    y: &[T],
    ax_cur: &[T],
    ax_prev: &[T],
    alpha_state: &mut f64,
) -> Result<T> {
    match policy.kind {
        MomentumKind::Constant => Ok(T::of(policy.tau)),
        MomentumKind::Adaptive => {
            if y.len() != ax_cur.len() || y.len() != ax_prev.len() {
                return Err(mismatch(
                    format!("{} measurements", y.len()),
                    format!("{} and {}", ax_cur.len(), ax_prev.len()),
                ));
            }
            let mut num = T::zero();
            let mut den = T::zero();
            for ((&yi, &c), &p) in y.iter().zip(ax_cur).zip(ax_prev) {
                let d = c - p;
                num += (yi - c) * d;
                den += d * d;
            }
            if den == T::zero() {
                Ok(T::zero())
            } else {
                Ok(num / den)
            }
        }
        MomentumKind::NesterovQ => {
            let (a, next) = nesterov_advance(*alpha_state, policy.q);
            *alpha_state = next;
            Ok(T::of(a * (1.0 - a) / (a * a + next)))
        }
    }
}

/// Returns `(α_i, α_{i+1})` with `α_{i+1}` the nonnegative root of
/// `α² + (α_i² − q) α − α_i² = 0`.
pub fn nesterov_advance(alpha: f64, q: f64) -> (f64, f64) {
    let b = alpha * alpha - q;
    let next = (-b + (b * b + 4.0 * alpha * alpha).sqrt()) / 2.0;
    (alpha, next)
}

/// `‖X_cur − X_prev‖_F ≤ tol ‖X_cur‖_F`, or the absolute change when `X_cur = 0`.
pub fn stopping_check<T: Scalar>(x_cur: &DenseMatrix<T>, x_prev: &DenseMatrix<T>, tol: f64) -> bool {
    let change = relative_change(x_cur, x_prev);
    change <= tol
}

/// Relative change used by [`stopping_check`]; absolute when `X_cur = 0`.
pub fn relative_change<T: Scalar>(x_cur: &DenseMatrix<T>, x_prev: &DenseMatrix<T>) -> f64 {
    let diff = (x_cur - x_prev).frobenius_norm().to_f64_lossy();
    let nrm = x_cur.frobenius_norm().to_f64_lossy();
    if nrm == 0.0 {
        diff
    } else {
        diff / nrm
    }
}
