//! Monte-Carlo estimate of the rank-restricted isometry constant.
//!
//! The true constant is a supremum over all rank-`k` matrices and is
//! intractable to compute; sampling gives a lower bound on it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Test-matrix family for [`rip_probe_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `L Rᵀ / ‖L Rᵀ‖_F` with Gaussian `m x k` and `n x k` factors.
    GaussianLowRank,
    /// Coherent rank-1 spikes `e_i e_jᵀ` at uniformly random positions.
    Spikes,
}

/// One-sided deviations of `‖A X‖²` from one over unit-norm test matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    /// `max(1 − ‖A X‖²)`, clamped at zero.
    pub lower: f64,
    /// `max(‖A X‖² − 1)`, clamped at zero.
    pub upper: f64,
}

impl RipEstimate {
    pub fn delta(&self) -> f64 {
        self.lower.max(self.upper)
    }
}

/// Gaussian low-rank probe.
pub fn rip_probe<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    rip_probe_with(op, ProbeFamily::GaussianLowRank, k, trials, seed)
}

pub fn rip_probe_with<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    family: ProbeFamily,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    let (m, n) = op.signal_dims();
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidRank { k, max: m.min(n) });
    }
    if trials == 0 {
        return Err(Error::InvalidInput("rip probe needs at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = RipEstimate { lower: 0.0, upper: 0.0 };
    for _ in 0..trials {
        let x = match family {
            ProbeFamily::GaussianLowRank => {
                let l = DenseMatrix::<T>::gaussian(m, k, &mut rng);
                let r = DenseMatrix::<T>::gaussian(n, k, &mut rng);
                let x = l.matmul_t(&r);
                let nrm = x.frobenius_norm();
                x.scale(nrm.recip())
            }
            ProbeFamily::Spikes => {
                let mut x = DenseMatrix::zeros(m, n);
                x[(rng.gen_range(0..m), rng.gen_range(0..n))] = T::one();
                x
            }
        };
        let ax = op.apply(&x)?;
        let energy = dot(&ax, &ax).to_f64_lossy();
        est.lower = est.lower.max(1.0 - energy);
        est.upper = est.upper.max(energy - 1.0);
    }
    Ok(est)
}
