//! Independent numerical oracles shared by the integration tests. None of
//! these call into the library's decompositions.

#![allow(dead_code)]

use lowrank::linalg::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    DenseMatrix::gaussian(m, n, rng)
}

/// Random rank-`k` matrix `L Rᵀ`.
pub fn low_rank(m: usize, n: usize, k: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    gaussian(m, k, rng).matmul_t(&gaussian(n, k, rng))
}

/// `U diag(s) Vᵀ` with random orthonormal `U`, `V` (classical Gram–Schmidt
/// on Gaussian columns, done here so the test does not rely on library code).
pub fn with_spectrum(m: usize, n: usize, s: &[f64], rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    let r = s.len();
    let u = gram_schmidt(&random_cols(m, r, rng));
    let v = gram_schmidt(&random_cols(n, r, rng));
    DenseMatrix::from_fn(m, n, |i, j| (0..r).map(|t| u[t][i] * s[t] * v[t][j]).sum())
}

fn random_cols(len: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let g = gaussian(len, count, rng);
    (0..count).map(|c| g.column(c)).collect()
}

/// Modified Gram–Schmidt with a re-pass; drops columns whose residual falls
/// below `1e-10` of their original norm.
pub fn gram_schmidt(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let orig = dotv(c, c).sqrt();
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &out {
                let d = dotv(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= d * qi;
                }
            }
        }
        let nrm = dotv(&w, &w).sqrt();
        if nrm > 1e-10 * orig.max(1e-300) {
            out.push(w.iter().map(|x| x / nrm).collect());
        }
    }
    out
}

pub fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Triple-loop product.
pub fn naive_matmul(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    assert_eq!(a.cols(), b.rows());
    let mut c = DenseMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = 0.0;
            for t in 0..a.cols() {
                s += a[(i, t)] * b[(t, j)];
            }
            c[(i, j)] = s;
        }
    }
    c
}

pub fn naive_transpose(a: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)])
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(a: &DenseMatrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Dominant right singular pair by power iteration on `XᵀX`; returns `(σ, u, v)`.
pub fn power_rank_one(x: &DenseMatrix<f64>, seed: u64) -> (f64, Vec<f64>, Vec<f64>) {
    let n = x.cols();
    let mut r = rng(seed);
    let mut v: Vec<f64> = (0..n).map(|_| r.gen::<f64>() - 0.5).collect();
    let xtx = naive_matmul(&naive_transpose(x), x);
    for _ in 0..100_000 {
        let w = xtx.mul_vec(&v);
        let nrm = dotv(&w, &w).sqrt();
        let next: Vec<f64> = w.iter().map(|a| a / nrm).collect();
        let lambda = dotv(&next, &xtx.mul_vec(&next));
        let res: Vec<f64> = xtx
            .mul_vec(&next)
            .iter()
            .zip(&next)
            .map(|(a, b)| a - lambda * b)
            .collect();
        v = next;
        if dotv(&res, &res).sqrt() <= 1e-12 * lambda.abs().max(1.0) {
            break;
        }
    }
    let xv = x.mul_vec(&v);
    let sigma = dotv(&xv, &xv).sqrt();
    let u = xv.iter().map(|a| a / sigma).collect();
    (sigma, u, v)
}

/// Solves `M z = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(m: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut a: Vec<Vec<f64>> = m.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..=n {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut z = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * z[c]).sum();
        z[row] = (a[row][n] - s) / a[row][row];
    }
    z
}

/// Argmin of a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Singular values from the Jacobi eigen-oracle on `XᵀX` (or `XXᵀ`).
pub fn oracle_singular_values(x: &DenseMatrix<f64>) -> Vec<f64> {
    let g = if x.rows() >= x.cols() {
        naive_matmul(&naive_transpose(x), x)
    } else {
        naive_matmul(x, &naive_transpose(x))
    };
    jacobi_eigenvalues(&g).into_iter().map(|e| e.max(0.0).sqrt()).collect()
}
