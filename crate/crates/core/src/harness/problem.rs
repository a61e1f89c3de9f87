use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, truncated_svd, DenseMatrix};
use crate::operators::{LinearOperator, Observation, Operator, OperatorDescriptor, OperatorKind};
use crate::scalar::Scalar;
use crate::solvers::mix_seed;

/// Synthetic recovery experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    pub n: usize,
    pub k_true: usize,
    /// Sampling ratio `p / (m n)`.
    pub sr: f64,
    /// `‖e‖_2` of the additive noise.
    pub noise_energy: f64,
    pub operator_kind: OperatorKind,
    pub trials: usize,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(m: usize, n: usize, k_true: usize, sr: f64) -> Self {
        Self {
            m,
            n,
            k_true,
            sr,
            noise_energy: 0.0,
            operator_kind: OperatorKind::Structured,
            trials: 10,
            seed: 0,
        }
    }

    pub fn with_noise(mut self, energy: f64) -> Self {
        self.noise_energy = energy;
        self
    }

    pub fn with_operator(mut self, kind: OperatorKind) -> Self {
        self.operator_kind = kind;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Measurement count `floor(SR · m · n)`.
    pub fn p(&self) -> usize {
        (self.sr * (self.m * self.n) as f64).floor() as usize
    }

    /// Degrees of freedom per measurement, `k (m + n − k) / p`.
    pub fn fr(&self) -> f64 {
        (self.k_true * (self.m + self.n - self.k_true)) as f64 / self.p() as f64
    }

    /// Seed of trial `trial`.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        mix_seed(self.seed ^ mix_seed(trial as u64 + 1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        if self.k_true == 0 || self.k_true > self.m.min(self.n) {
            return Err(Error::InvalidRank {
                k: self.k_true,
                max: self.m.min(self.n),
            });
        }
        if !(self.sr > 0.0 && self.sr <= 1.0) {
            return Err(Error::InvalidInput(format!("sampling ratio must be in (0, 1], got {}", self.sr)));
        }
        if self.p() < 1 {
            return Err(Error::InvalidInput(format!(
                "SR * m * n = {} yields no measurements",
                self.sr * (self.m * self.n) as f64
            )));
        }
        if !(self.noise_energy >= 0.0 && self.noise_energy.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "noise energy must be finite and >= 0, got {}",
                self.noise_energy
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// One realization of a [`ProblemSpec`].
#[derive(Clone, Debug)]
pub struct Problem<T> {
    pub x_true: DenseMatrix<T>,
    pub operator: Operator<T>,
    pub observation: Observation<T>,
}

/// Draws `X* = L Rᵀ / ‖L Rᵀ‖_F`, the operator and `y = A X* + e` from `spec.seed`.
pub fn generate_problem<T: Scalar>(spec: &ProblemSpec) -> Result<Problem<T>> {
    generate_with_seed(spec, spec.seed)
}

/// As [`generate_problem`] for Monte-Carlo trial `trial`.
pub fn generate_trial<T: Scalar>(spec: &ProblemSpec, trial: usize) -> Result<Problem<T>> {
    generate_with_seed(spec, spec.trial_seed(trial))
}

fn generate_with_seed<T: Scalar>(spec: &ProblemSpec, seed: u64) -> Result<Problem<T>> {
    spec.validate()?;
    let (m, n, k) = (spec.m, spec.n, spec.k_true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_true = loop {
        let l = DenseMatrix::<T>::gaussian(m, k, &mut rng);
        let r = DenseMatrix::<T>::gaussian(n, k, &mut rng);
        let x = l.matmul_t(&r);
        let f = truncated_svd(&x, k)?;
        if f.sigma[k - 1] > T::rank_tol() * f.sigma[0] {
            break x.scale(T::one() / x.frobenius_norm());
        }
    };
    let operator: Operator<T> = OperatorDescriptor {
        kind: spec.operator_kind,
        m,
        n,
        p: spec.p(),
        seed: mix_seed(seed ^ 0x6f70),
    }
    .build()?;
    let mut y = operator.apply(&x_true)?;
    let noise_energy = T::of(spec.noise_energy);
    if spec.noise_energy > 0.0 {
        let e = DenseMatrix::<T>::gaussian(y.len(), 1, &mut rng).into_vec();
        let scale = noise_energy / norm(&e);
        for (yi, ei) in y.iter_mut().zip(&e) {
            *yi += scale * *ei;
        }
    }
    Ok(Problem {
        x_true,
        operator,
        observation: Observation { y, noise_energy },
    })
}
