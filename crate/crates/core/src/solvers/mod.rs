//! Hard-thresholding solvers sharing one step-size, momentum and stopping
//! machinery.
//!
//! Every solver starts from `X(0) = 0` with an empty atom set and keeps
//! `rank(X(i)) <= k`.

mod cg;
mod config;
mod report;
mod step;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix, SubspaceBasis};
use crate::operators::LinearOperator;
use crate::projection::{project, ProjectorSpec};
use crate::scalar::Scalar;

pub use cg::{restricted_least_squares, restricted_least_squares_from, LeastSquaresOutcome};
pub use config::{Algorithm, MomentumKind, MomentumPolicy, SolverConfig, SubspaceProjection, UnionMode};
pub use report::{IterationRecord, SolveReport, StepDiagnostics, Termination};
pub use step::{
    line_search_step, momentum_tau, nesterov_advance, relative_change, restricted_complement,
    restricted_projection, step_size_mu, stopping_check,
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
pub fn mix_seed(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for slot `slot` of iteration `iter` of a run seeded with `base`.
pub fn derive_seed(base: u64, iter: u64, slot: u64) -> u64 {
    mix_seed(mix_seed(base ^ mix_seed(iter)) ^ slot)
}

/// Iterate and memory of a running solver.
#[derive(Clone, Debug)]
pub struct SolverState<T> {
    /// `X(i)`.
    pub x_cur: DenseMatrix<T>,
    /// `X(i−1)`.
    pub x_prev: DenseMatrix<T>,
    /// Atom set `X_i` of `X(i)`.
    pub basis_cur: SubspaceBasis<T>,
    /// Extrapolated point `Q(i)` (momentum solvers; equals `X(i)` otherwise).
    pub q_cur: DenseMatrix<T>,
    /// Memory subspace `Q_i`.
    pub q_basis: SubspaceBasis<T>,
    pub iter: usize,
    /// Nesterov `α_i`.
    pub alpha_cur: f64,
    ax_cur: Vec<T>,
    aq_cur: Vec<T>,
}

impl<T: Scalar> SolverState<T> {
    fn initial(m: usize, n: usize, p: usize, alpha0: f64) -> Self {
        Self {
            x_cur: DenseMatrix::zeros(m, n),
            x_prev: DenseMatrix::zeros(m, n),
            basis_cur: SubspaceBasis::empty(m, n),
            q_cur: DenseMatrix::zeros(m, n),
            q_basis: SubspaceBasis::empty(m, n),
            iter: 0,
            alpha_cur: alpha0,
            ax_cur: vec![T::zero(); p],
            aq_cur: vec![T::zero(); p],
        }
    }
}

struct Proposal<T> {
    x: DenseMatrix<T>,
    basis: SubspaceBasis<T>,
    steps: StepDiagnostics,
    warning: Option<String>,
}

struct Engine<'a, T, A: ?Sized> {
    op: &'a A,
    y: &'a [T],
    config: &'a SolverConfig,
    projector: ProjectorSpec,
}

impl<'a, T: Scalar, A: LinearOperator<T> + ?Sized> Engine<'a, T, A> {
    fn mode(&self) -> SubspaceProjection {
        self.config.projection_mode
    }

    fn project_k(&self, iter: usize, slot: u64, x: &DenseMatrix<T>) -> Result<(SubspaceBasis<T>, DenseMatrix<T>)> {
        let spec = self
            .projector
            .with_seed(derive_seed(self.config.seed, iter as u64, slot));
        project(&spec, x)
    }

    /// `∇f` at a point whose measurements `A Z` are `az`.
    fn gradient_from(&self, az: &[T]) -> Result<DenseMatrix<T>> {
        let r: Vec<T> = self.y.iter().zip(az).map(|(&a, &b)| a - b).collect();
        let mut g = self.op.adjoint(&r)?;
        g.scale_in_place(-T::of(2.0));
        Ok(g)
    }

    fn f_at(&self, az: &[T]) -> T {
        self.y
            .iter()
            .zip(az)
            .map(|(&a, &b)| (a - b) * (a - b))
            .fold(T::zero(), |s, v| s + v)
    }

    /// Steps 1–2: best rank-`k` directions of the gradient orthogonal to the
    /// current atoms, merged with them.
    fn expand(&self, iter: usize, basis: &SubspaceBasis<T>, g: &DenseMatrix<T>) -> Result<SubspaceBasis<T>> {
        let perp = restricted_complement(basis, g, self.mode())?;
        let (d, _) = self.project_k(iter, 0, &perp)?;
        d.ortho_union(basis)
    }

    /// Proposes `X(i+1)` from the point `z` (with atoms `z_basis` and
    /// measurements `az`); `None` when the relevant gradient vanishes.
    fn propose(
        &self,
        iter: usize,
        z: &DenseMatrix<T>,
        z_basis: &SubspaceBasis<T>,
        az: &[T],
    ) -> Result<Option<Proposal<T>>> {
        let two = T::of(2.0);
        let g = self.gradient_from(az)?;
        let mut steps = StepDiagnostics::default();
        let mut warning = None;

        if self.config.algorithm == Algorithm::Svp {
            if g.frobenius_norm_sq() == T::zero() {
                return Ok(None);
            }
            let mu = T::of(self.config.svp_mu);
            steps.mu = Some(self.config.svp_mu);
            let mut v = z.clone();
            v.axpy(-mu / two, &g);
            let (basis, x) = self.project_k(iter, 1, &v)?;
            return Ok(Some(Proposal { x, basis, steps, warning }));
        }

        let s = self.expand(iter, z_basis, &g)?;
        let pg = restricted_projection(&s, &g, self.mode())?;

        if self.config.algorithm == Algorithm::Admira {
            if pg.frobenius_norm_sq() == T::zero() {
                return Ok(None);
            }
            let ls = restricted_least_squares_from(
                self.op,
                self.y,
                &s,
                Some(z),
                self.config.cg_maxiter,
                self.config.cg_tol,
                self.mode(),
            )?;
            steps.cg_iters = Some(ls.iterations);
            steps.cg_converged = Some(ls.converged);
            if ls.rank_deficient {
                warning = Some(format!(
                    "iteration {}: operator is rank deficient on the expanded subspace",
                    iter + 1
                ));
            }
            let (basis, x) = self.project_k(iter, 1, &ls.solution)?;
            return Ok(Some(Proposal { x, basis, steps, warning }));
        }

        let mu = match line_search_step(self.op, &pg)? {
            Some(mu) => mu,
            None => return Ok(None),
        };
        steps.mu = Some(mu.to_f64_lossy());
        let mut v = z.clone();
        v.axpy(-mu / two, &pg);
        let (w_basis, w) = self.project_k(iter, 1, &v)?;

        if self.config.algorithm != Algorithm::Alps1 {
            return Ok(Some(Proposal {
                x: w,
                basis: w_basis,
                steps,
                warning,
            }));
        }

        // De-bias on the selected atoms.
        let aw = self.op.apply(&w)?;
        let gw = self.gradient_from(&aw)?;
        let pgw = restricted_projection(&w_basis, &gw, self.mode())?;
        let xi = line_search_step(self.op, &pgw)?.unwrap_or_else(T::zero);
        let mut xd = w;
        xd.axpy(-xi / two, &pgw);
        steps.xi = Some(xi.to_f64_lossy());
        steps.f_selected = Some(self.f_at(&aw).to_f64_lossy());
        steps.f_debiased = Some(self.f_at(&self.op.apply(&xd)?).to_f64_lossy());
        let (basis, x) = self.project_k(iter, 2, &xd)?;
        Ok(Some(Proposal { x, basis, steps, warning }))
    }
}

/// Runs the configured solver on `y ≈ A X`.
///
/// `x_true`, when given, is only used to fill the error trace.
pub fn solve<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    config: &SolverConfig,
    x_true: Option<&DenseMatrix<T>>,
) -> Result<(DenseMatrix<T>, SolveReport)> {
    config.validate()?;
    op.check_measurements(y)?;
    let (m, n) = op.signal_dims();
    if config.k > m.min(n) {
        return Err(Error::InvalidRank {
            k: config.k,
            max: m.min(n),
        });
    }
    if let Some(t) = x_true {
        op.check_signal(t)?;
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("measurements"));
    }

    let start = Instant::now();
    let engine = Engine {
        op,
        y,
        config,
        projector: config.effective_projector(),
    };
    let momentum = config.algorithm.uses_momentum();
    let mut st = SolverState::initial(m, n, y.len(), config.momentum.alpha0);
    let f0 = dot(y, y).to_f64_lossy();
    let mut trace = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut termination = Termination::MaxIterations;
    let err_of = |x: &DenseMatrix<T>| x_true.map(|t| (x - t).frobenius_norm().to_f64_lossy());

    for i in 0..config.max_iters {
        let proposal = if momentum {
            engine.propose(i, &st.q_cur, &st.q_basis, &st.aq_cur)?
        } else {
            engine.propose(i, &st.x_cur, &st.basis_cur, &st.ax_cur)?
        };
        let Some(Proposal {
            x: x_next,
            basis: basis_next,
            mut steps,
            warning,
        }) = proposal
        else {
            st.iter = i + 1;
            st.x_prev = st.x_cur.clone();
            trace.push(IterationRecord {
                iter: i + 1,
                rel_change: 0.0,
                f_value: engine.f_at(&st.ax_cur).to_f64_lossy(),
                err_vs_truth: err_of(&st.x_cur),
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                steps: StepDiagnostics::default(),
            });
            termination = Termination::ZeroGradient;
            break;
        };
        if let Some(w) = warning {
            if warnings.len() < 20 {
                warnings.push(w);
            }
        }

        if !x_next.is_finite() {
            return Err(Error::Divergence {
                iteration: i + 1,
                reason: "non-finite iterate".into(),
            });
        }
        let ax_next = op.apply(&x_next)?;
        let f = engine.f_at(&ax_next).to_f64_lossy();
        if !f.is_finite() || (f0 > 0.0 && f > config.divergence_factor * f0) {
            return Err(Error::Divergence {
                iteration: i + 1,
                reason: format!("data error {f:e} exceeds {:e} x initial {f0:e}", config.divergence_factor),
            });
        }
        let rel = relative_change(&x_next, &st.x_cur);

        if momentum {
            let tau = momentum_tau(&config.momentum, y, &ax_next, &st.ax_cur, &mut st.alpha_cur)?;
            steps.tau = Some(tau.to_f64_lossy());
            let mut q = x_next.clone();
            q.axpy(tau, &(&x_next - &st.x_cur));
            st.aq_cur = ax_next
                .iter()
                .zip(&st.ax_cur)
                .map(|(&c, &p)| c + tau * (c - p))
                .collect();
            st.q_cur = q;
            st.q_basis = match config.union_mode {
                UnionMode::Ortho => st.basis_cur.ortho_union(&basis_next)?,
                UnionMode::Raw => st.basis_cur.raw_union(&basis_next)?,
            };
        }

        st.x_prev = std::mem::replace(&mut st.x_cur, x_next);
        st.basis_cur = basis_next;
        st.ax_cur = ax_next;
        st.iter = i + 1;
        trace.push(IterationRecord {
            iter: i + 1,
            rel_change: rel,
            f_value: f,
            err_vs_truth: err_of(&st.x_cur),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            steps,
        });
        if rel <= config.tol {
            termination = Termination::Tolerance;
            break;
        }
    }

    let report = SolveReport {
        algorithm: config.algorithm,
        k: config.k,
        iterations: st.iter,
        termination,
        final_f: trace.last().map(|r| r.f_value).unwrap_or(f0),
        final_error: err_of(&st.x_cur),
        elapsed_s: start.elapsed().as_secs_f64(),
        trace,
        warnings,
    };
    Ok((st.x_cur, report))
}
