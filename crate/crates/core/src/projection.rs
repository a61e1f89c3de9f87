//! Interchangeable rank-`k` projection engines.
//!
//! * [`ProjectionMode::Exact`] is the truncated SVD.
//! * [`ProjectionMode::RandomizedPower`] captures the range of `(X Xᵀ)^q X Ω`
//!   for a Gaussian test matrix `Ω`, re-orthonormalizing after every pass.
//! * [`ProjectionMode::ColumnSubset`] adaptively samples columns of `X`
//!   proportionally to their squared residual norms and truncates the
//!   projection onto the sampled dictionary.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{best_rank_k, complete_basis, orthonormal_columns, svd, DenseMatrix, SubspaceBasis};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    Exact,
    RandomizedPower,
    ColumnSubset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSpec {
    pub mode: ProjectionMode,
    pub k: usize,
    /// Power iterations (randomized mode).
    pub q: usize,
    /// Extra test columns, truncated away afterwards (randomized mode).
    pub oversample: usize,
    /// Target approximation slack (column-subset mode).
    pub epsilon: f64,
    pub seed: u64,
}

impl ProjectorSpec {
    pub fn exact(k: usize) -> Self {
        Self {
            mode: ProjectionMode::Exact,
            k,
            q: 2,
            oversample: 5,
            epsilon: 0.5,
            seed: 0,
        }
    }

    pub fn randomized(k: usize, q: usize, seed: u64) -> Self {
        Self {
            mode: ProjectionMode::RandomizedPower,
            q,
            seed,
            ..Self::exact(k)
        }
    }

    pub fn column_subset(k: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            mode: ProjectionMode::ColumnSubset,
            epsilon,
            seed,
            ..Self::exact(k)
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_rank(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("projector rank k must be >= 1".into()));
        }
        if self.mode == ProjectionMode::ColumnSubset && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "column-subset epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Number of adaptive sampling rounds `ceil(2(k+1)(ln(k+1)+1))`.
    pub fn css_rounds(&self) -> usize {
        let k1 = (self.k + 1) as f64;
        (2.0 * k1 * (k1.ln() + 1.0)).ceil() as usize
    }

    /// Columns drawn per round, `ceil(k/ε + k² ln k)` before capping at `n`.
    pub fn css_round_size(&self) -> usize {
        let k = self.k as f64;
        (k / self.epsilon + k * k * k.ln()).ceil().max(1.0) as usize
    }
}

/// Rank-`k` projection of `x` per `spec`; returns the atom set and the
/// rank-`k` matrix.
pub fn project<T: Scalar>(spec: &ProjectorSpec, x: &DenseMatrix<T>) -> Result<(SubspaceBasis<T>, DenseMatrix<T>)> {
    spec.validate()?;
    let (m, n) = x.shape();
    if spec.k > m.min(n) {
        return Err(Error::InvalidRank {
            k: spec.k,
            max: m.min(n),
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("projection input"));
    }
    match spec.mode {
        ProjectionMode::Exact => best_rank_k(x, spec.k),
        ProjectionMode::RandomizedPower => Ok(randomized(spec, x)),
        ProjectionMode::ColumnSubset => Ok(column_subset(spec, x)),
    }
}

/// `ε̂ = ‖X̂ − X‖²_F / ‖P_k(X) − X‖²_F − 1`.
pub fn measured_epsilon<T: Scalar>(spec: &ProjectorSpec, x: &DenseMatrix<T>) -> Result<f64> {
    let (_, optimal) = best_rank_k(x, spec.k)?;
    let denom = (&optimal - x).frobenius_norm_sq().to_f64_lossy();
    let scale = x.frobenius_norm_sq().to_f64_lossy();
    if denom <= 1e3 * f64::EPSILON * scale || denom == 0.0 {
        return Err(Error::Degenerate(format!(
            "input has rank <= {}; the optimal residual vanishes",
            spec.k
        )));
    }
    let (_, approx) = project(spec, x)?;
    let num = (&approx - x).frobenius_norm_sq().to_f64_lossy();
    Ok(num / denom - 1.0)
}

/// Truncated SVD of `Q Qᵀ X` for an orthonormal `q`, returned in ambient coordinates.
fn truncate_in_range<T: Scalar>(q: &DenseMatrix<T>, x: &DenseMatrix<T>, k: usize) -> (SubspaceBasis<T>, DenseMatrix<T>) {
    let (m, n) = x.shape();
    if q.cols() == 0 {
        let basis = SubspaceBasis::from_parts(
            complete_basis(&DenseMatrix::zeros(m, 0), k),
            complete_basis(&DenseMatrix::zeros(n, 0), k),
            true,
        );
        return (basis, DenseMatrix::zeros(m, n));
    }
    let b = q.t_matmul(x);
    let f = svd(&b).expect("finite projected matrix").truncate(k);
    let mut u = q.matmul(&f.u);
    let mut v = f.v;
    let mut sigma = f.sigma;
    if sigma.len() < k {
        u = complete_basis(&u, k);
        v = complete_basis(&v, k);
        sigma.resize(k, T::zero());
    }
    let approx = crate::linalg::SvdFactors { u, sigma, v };
    let mat = approx.reconstruct();
    (SubspaceBasis::from_parts(approx.u, approx.v, true), mat)
}

fn randomized<T: Scalar>(spec: &ProjectorSpec, x: &DenseMatrix<T>) -> (SubspaceBasis<T>, DenseMatrix<T>) {
    let (m, n) = x.shape();
    let l = (spec.k + spec.oversample).min(m.min(n));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let omega = DenseMatrix::<T>::gaussian(n, l, &mut rng);
    let mut q = orthonormal_columns(&x.matmul(&omega));
    for _ in 0..spec.q {
        if q.cols() == 0 {
            break;
        }
        let z = orthonormal_columns(&x.t_matmul(&q));
        q = orthonormal_columns(&x.matmul(&z));
    }
    truncate_in_range(&q, x, spec.k)
}

fn column_subset<T: Scalar>(spec: &ProjectorSpec, x: &DenseMatrix<T>) -> (SubspaceBasis<T>, DenseMatrix<T>) {
    let (m, n) = x.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let per_round = spec.css_round_size().min(n);
    let total = x.frobenius_norm_sq().to_f64_lossy();
    let xt = x.transpose();
    let mut dict = DenseMatrix::<T>::zeros(m, 0);
    let mut residual = x.clone();

    for _ in 0..spec.css_rounds() {
        let rt = residual.transpose();
        let weights: Vec<f64> = (0..n)
            .map(|j| crate::linalg::dot(rt.row(j), rt.row(j)).to_f64_lossy())
            .collect();
        let energy: f64 = weights.iter().sum();
        if !(energy > 1e-24 * total) || dict.cols() >= m {
            break;
        }
        let sampler = match WeightedIndex::new(&weights) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut picked: Vec<usize> = (0..per_round).map(|_| sampler.sample(&mut rng)).collect();
        picked.sort_unstable();
        picked.dedup();
        let chosen = DenseMatrix::from_fn(m, picked.len(), |i, c| xt[(picked[c], i)]);
        dict = orthonormal_columns(&dict.hstack(&chosen).expect("row counts agree"));
        residual = x - &dict.matmul(&dict.t_matmul(x));
    }
    truncate_in_range(&dict, x, spec.k)
}
