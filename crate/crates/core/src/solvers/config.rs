use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projection::{ProjectionMode, ProjectorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Gradient step on the expanded subspace, rank-k selection, then a
    /// de-bias gradient step on the selected subspace.
    Alps1,
    /// `Alps1` without the de-bias step.
    Alps1Nodebias,
    /// Least-squares solve on the expanded subspace instead of a gradient step.
    Admira,
    /// `Alps1Nodebias` run on a momentum-extrapolated iterate.
    Alps2,
    /// `Alps2` with randomized power-iteration projections.
    Alps2Qr,
    /// Projected gradient descent with a constant step.
    Svp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Alps1,
        Algorithm::Alps1Nodebias,
        Algorithm::Admira,
        Algorithm::Alps2,
        Algorithm::Alps2Qr,
        Algorithm::Svp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alps1 => "alps1",
            Algorithm::Alps1Nodebias => "alps1_nodebias",
            Algorithm::Admira => "admira",
            Algorithm::Alps2 => "alps2",
            Algorithm::Alps2Qr => "alps2_qr",
            Algorithm::Svp => "svp",
        }
    }

    pub fn uses_momentum(self) -> bool {
        matches!(self, Algorithm::Alps2 | Algorithm::Alps2Qr)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown algorithm '{s}'")))
    }
}

/// How `P_S` is evaluated inside the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceProjection {
    /// `P_U X + X P_V − P_U X P_V`.
    ExactTwoSided,
    /// `P_U X` when `m <= n`, otherwise `X P_V`.
    LeftInexact,
}

/// How the memory subspace `Q_{i+1}` of the momentum solvers is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnionMode {
    Ortho,
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumKind {
    Constant,
    Adaptive,
    NesterovQ,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumPolicy {
    pub kind: MomentumKind,
    /// Constant step, `0 <= tau < 1`.
    pub tau: f64,
    /// Inverse squared condition number guess, `0 < q <= 1`.
    pub q: f64,
    /// Initial `alpha`, `0 < alpha0 < 1`.
    pub alpha0: f64,
}

impl MomentumPolicy {
    pub fn adaptive() -> Self {
        Self {
            kind: MomentumKind::Adaptive,
            tau: 0.0,
            q: 1.0,
            alpha0: 0.5,
        }
    }

    pub fn constant(tau: f64) -> Self {
        Self {
            kind: MomentumKind::Constant,
            tau,
            ..Self::adaptive()
        }
    }

    pub fn nesterov(q: f64, alpha0: f64) -> Self {
        Self {
            kind: MomentumKind::NesterovQ,
            q,
            alpha0,
            ..Self::adaptive()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            MomentumKind::Constant if !(0.0..1.0).contains(&self.tau) => Err(Error::InvalidInput(
                format!("constant momentum needs 0 <= tau < 1, got {}", self.tau),
            )),
            MomentumKind::NesterovQ if !(self.q > 0.0 && self.q <= 1.0) => Err(Error::InvalidInput(
                format!("nesterov momentum needs 0 < q <= 1, got {}", self.q),
            )),
            MomentumKind::NesterovQ if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) => Err(
                Error::InvalidInput(format!("nesterov momentum needs 0 < alpha0 < 1, got {}", self.alpha0)),
            ),
            _ => Ok(()),
        }
    }
}

impl Default for MomentumPolicy {
    fn default() -> Self {
        Self::adaptive()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    pub max_iters: usize,
    /// Relative-change stopping threshold.
    pub tol: f64,
    pub projection_mode: SubspaceProjection,
    pub projector: ProjectorSpec,
    pub momentum: MomentumPolicy,
    pub union_mode: UnionMode,
    pub cg_maxiter: usize,
    pub cg_tol: f64,
    /// Constant step of the SVP baseline.
    pub svp_mu: f64,
    /// Abort when `f(X(i))` exceeds this multiple of `f(X(0))`.
    pub divergence_factor: f64,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, k: usize) -> Self {
        Self {
            algorithm,
            k,
            max_iters: 500,
            tol: 5e-5,
            projection_mode: SubspaceProjection::ExactTwoSided,
            projector: ProjectorSpec::exact(k),
            momentum: MomentumPolicy::adaptive(),
            union_mode: UnionMode::Ortho,
            cg_maxiter: 500,
            cg_tol: 1e-10,
            svp_mu: 1.0,
            divergence_factor: 1e6,
            seed: 0,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_projector(mut self, projector: ProjectorSpec) -> Self {
        self.projector = projector;
        self
    }

    pub fn with_momentum(mut self, momentum: MomentumPolicy) -> Self {
        self.momentum = momentum;
        self
    }

    pub fn with_union(mut self, union_mode: UnionMode) -> Self {
        self.union_mode = union_mode;
        self
    }

    pub fn with_projection_mode(mut self, mode: SubspaceProjection) -> Self {
        self.projection_mode = mode;
        self
    }

    pub fn with_svp_mu(mut self, mu: f64) -> Self {
        self.svp_mu = mu;
        self
    }

    /// Projector actually used by the solver: the randomized engine for
    /// `alps2_qr`, otherwise the configured one, always at rank `k`.
    pub fn effective_projector(&self) -> ProjectorSpec {
        let spec = self.projector.with_rank(self.k);
        if self.algorithm == Algorithm::Alps2Qr && spec.mode != ProjectionMode::RandomizedPower {
            ProjectorSpec {
                mode: ProjectionMode::RandomizedPower,
                ..spec
            }
        } else {
            spec
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("rank k must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.cg_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cg_tol must be positive, got {}",
                self.cg_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be >= 1".into()));
        }
        if !(self.svp_mu > 0.0 && self.svp_mu.is_finite()) {
            return Err(Error::InvalidInput(format!("svp_mu must be positive, got {}", self.svp_mu)));
        }
        self.momentum.validate()?;
        self.effective_projector().validate()
    }
}
