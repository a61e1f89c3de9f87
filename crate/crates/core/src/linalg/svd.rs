//! Singular value decompositions.
//!
//! Two backends live here:
//!
//! * a one-sided (Hestenes) Jacobi SVD, accurate to working precision and used
//!   for the full thin decomposition and for every small matrix;
//! * a Golub–Kahan–Lanczos bidiagonalization with full reorthogonalization for
//!   the leading `k` singular triplets of larger matrices. Iteration stops once
//!   every requested Ritz triplet has residual below `eps^(2/3) * sigma_1`, so
//!   the result is exact to that tolerance rather than approximate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::{axpy, dot, norm, DenseMatrix};
use super::ortho::{columns_of, complete_basis, from_columns, project_out, push_orthonormal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Below this `min(m, n)` the truncated SVD uses the dense Jacobi path.
const DENSE_CUTOFF: usize = 48;
const MAX_JACOBI_SWEEPS: usize = 80;
const LANCZOS_SEED: u64 = 0x51ed_270b_9e37_79b9;

/// Thin SVD `X = U diag(sigma) Vᵀ` with singular values sorted nonincreasing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvdFactors<T> {
    pub u: DenseMatrix<T>,
    pub sigma: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> SvdFactors<T> {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (x, &s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *x *= s;
            }
        }
        us.matmul_t(&self.v)
    }

    /// Keeps the leading `k` triplets.
    pub fn truncate(mut self, k: usize) -> Self {
        let k = k.min(self.sigma.len());
        self.sigma.truncate(k);
        self.u = self.u.leading_columns(k);
        self.v = self.v.leading_columns(k);
        self
    }
}

/// Full thin SVD with `l = min(m, n)` triplets.
pub fn svd<T: Scalar>(x: &DenseMatrix<T>) -> Result<SvdFactors<T>> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::InvalidInput("svd of an empty matrix".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    Ok(jacobi_svd(x))
}

/// Leading `k` singular triplets of `x`.
pub fn truncated_svd<T: Scalar>(x: &DenseMatrix<T>, k: usize) -> Result<SvdFactors<T>> {
    let (m, n) = x.shape();
    let max = m.min(n);
    if k == 0 || k > max {
        return Err(Error::InvalidRank { k, max });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if max <= DENSE_CUTOFF {
        return Ok(jacobi_svd(x).truncate(k));
    }
    Ok(lanczos_svd(x, k))
}

fn jacobi_svd<T: Scalar>(x: &DenseMatrix<T>) -> SvdFactors<T> {
    if x.rows() >= x.cols() {
        jacobi_tall(x)
    } else {
        let f = jacobi_tall(&x.transpose());
        SvdFactors {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        }
    }
}

/// One-sided Jacobi on the columns of a matrix with `rows >= cols`.
fn jacobi_tall<T: Scalar>(a: &DenseMatrix<T>) -> SvdFactors<T> {
    let (m, n) = a.shape();
    let mut w = columns_of(a);
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let alpha = dot(&w[i], &w[i]);
                let beta = dot(&w[j], &w[j]);
                let gamma = dot(&w[i], &w[j]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, T)> = w.iter().map(|c| norm(c)).enumerate().collect();
    // stable sort keeps the decomposition's order among ties
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let smax = order.first().map_or(T::zero(), |o| o.1);

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut deficient = false;
    for &(idx, s) in &order {
        sigma.push(s);
        v_cols.push(v[idx].clone());
        if !deficient && s > T::rank_tol() * smax && s > T::zero() {
            let inv = s.recip();
            let col: Vec<T> = w[idx].iter().map(|&x| x * inv).collect();
            if push_orthonormal(&mut u_cols, col) {
                continue;
            }
        }
        deficient = true;
    }
    let u = complete_basis(&from_columns(m, &u_cols), n);
    SvdFactors {
        u,
        sigma,
        v: from_columns(n, &v_cols),
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], i: usize, j: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(j);
    let (ci, cj) = (&mut lo[i], &mut hi[0]);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn random_unit<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v: Vec<T> = (0..dim)
        .map(|_| T::of(StandardNormal.sample(rng)))
        .collect();
    let inv = norm(&v).recip();
    v.iter_mut().for_each(|x| *x *= inv);
    v
}

/// Random unit vector orthogonal to `basis`, or `None` if the basis is full.
fn random_orthogonal<T: Scalar>(basis: &[Vec<T>], dim: usize, rng: &mut ChaCha8Rng) -> Option<Vec<T>> {
    if basis.len() >= dim {
        return None;
    }
    for _ in 0..8 {
        let mut v = random_unit(dim, rng);
        project_out(basis, &mut v);
        let r = norm(&v);
        if r > T::of(1e-3) {
            let inv = r.recip();
            v.iter_mut().for_each(|x| *x *= inv);
            return Some(v);
        }
    }
    None
}

fn bidiagonal<T: Scalar>(alphas: &[T], betas: &[T]) -> DenseMatrix<T> {
    let j = alphas.len();
    let mut b = DenseMatrix::zeros(j, j);
    for i in 0..j {
        b[(i, i)] = alphas[i];
        if i + 1 < j {
            b[(i, i + 1)] = betas[i];
        }
    }
    b
}

fn lanczos_svd<T: Scalar>(x: &DenseMatrix<T>, k: usize) -> SvdFactors<T> {
    let (m, n) = x.shape();
    let max_steps = m.min(n);
    let xnorm = x.frobenius_norm();
    if xnorm == T::zero() {
        return SvdFactors {
            u: complete_basis(&DenseMatrix::zeros(m, 0), k),
            sigma: vec![T::zero(); k],
            v: complete_basis(&DenseMatrix::zeros(n, 0), k),
        };
    }
    let tiny = xnorm * T::rank_tol();
    let conv_tol = T::epsilon().powf(T::of(2.0 / 3.0));
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);

    let mut us: Vec<Vec<T>> = Vec::new();
    let mut vs: Vec<Vec<T>> = vec![random_unit(n, &mut rng)];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut restarted = false;
    let mut next_check = (k + 2).min(max_steps);

    loop {
        let j = alphas.len();
        let mut u = x.mul_vec(&vs[j]);
        if j > 0 {
            axpy(-betas[j - 1], &us[j - 1], &mut u);
        }
        project_out(&us, &mut u);
        let mut alpha = norm(&u);
        if alpha <= tiny {
            if restarted {
                // a fresh direction orthogonal to everything so far carries no energy
                vs.pop();
                betas.pop();
                break;
            }
            alpha = T::zero();
            match random_orthogonal(&us, m, &mut rng) {
                Some(r) => u = r,
                None => {
                    vs.pop();
                    betas.pop();
                    break;
                }
            }
        } else {
            let inv = alpha.recip();
            u.iter_mut().for_each(|e| *e *= inv);
        }
        restarted = false;
        alphas.push(alpha);
        us.push(u);
        let steps = alphas.len();

        let mut w = x.t_mul_vec(&us[j]);
        axpy(-alpha, &vs[j], &mut w);
        project_out(&vs, &mut w);
        let beta = norm(&w);

        if steps >= max_steps {
            betas.push(beta);
            if beta <= tiny {
                break;
            }
            // Krylov space exhausted without the residual vanishing; fall back.
            return jacobi_svd(x).truncate(k);
        }

        if beta <= tiny {
            betas.push(T::zero());
            match random_orthogonal(&vs, n, &mut rng) {
                Some(r) => {
                    vs.push(r);
                    restarted = true;
                    continue;
                }
                None => break,
            }
        }
        betas.push(beta);
        let inv = beta.recip();
        w.iter_mut().for_each(|e| *e *= inv);
        vs.push(w);

        if steps >= next_check && steps >= k {
            let f = jacobi_svd(&bidiagonal(&alphas, &betas[..steps - 1]));
            let s1 = f.sigma[0];
            let converged = (0..k).all(|i| beta * f.u[(steps - 1, i)].abs() <= conv_tol * s1);
            if converged || s1 == T::zero() {
                break;
            }
            next_check = steps + (steps / 10).max(1);
        }
    }

    assemble(m, n, k, &us, &vs, &alphas, &betas)
}

fn assemble<T: Scalar>(
    m: usize,
    n: usize,
    k: usize,
    us: &[Vec<T>],
    vs: &[Vec<T>],
    alphas: &[T],
    betas: &[T],
) -> SvdFactors<T> {
    let j = alphas.len();
    if j == 0 {
        return SvdFactors {
            u: complete_basis(&DenseMatrix::zeros(m, 0), k),
            sigma: vec![T::zero(); k],
            v: complete_basis(&DenseMatrix::zeros(n, 0), k),
        };
    }
    let f = jacobi_svd(&bidiagonal(alphas, &betas[..j - 1]));
    let r = k.min(j);
    let u_basis = from_columns(m, &us[..j]);
    let v_basis = from_columns(n, &vs[..j]);
    let mut u = u_basis.matmul(&f.u.leading_columns(r));
    let mut v = v_basis.matmul(&f.v.leading_columns(r));
    let mut sigma = f.sigma[..r].to_vec();
    if r < k {
        u = complete_basis(&u, k);
        v = complete_basis(&v, k);
        sigma.resize(k, T::zero());
    }
    SvdFactors { u, sigma, v }
}
