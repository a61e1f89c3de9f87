//! Benchmark driver: synthetic recovery sweeps, the toy completion example,
//! image completion and RIP probing.
//!
//! Exit status: 0 on success, 1 on invalid input or I/O failure, 2 when a
//! solver diverged.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lowrank::harness::{
    denoise_image, emit_table, generate_problem, run_monte_carlo, run_toy_example, write_pgm, ProblemSpec,
    SnrReference, TableFormat,
};
use lowrank::operators::{rip_probe, OperatorKind};
use lowrank::projection::{ProjectionMode, ProjectorSpec};
use lowrank::solvers::{Algorithm, MomentumPolicy, SolverConfig, SubspaceProjection, UnionMode};

#[derive(Parser, Debug)]
#[command(name = "lowrank-bench", version, about = "Low-rank recovery benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Affine rank minimization with a structured random operator.
    Arm(SweepArgs),
    /// Matrix completion from uniformly sampled entries.
    Mc(SweepArgs),
    /// The 5x4 rank-2 completion example.
    Toy {
        #[arg(long, value_enum, default_value = "alps2")]
        algo: AlgoArg,
    },
    /// Grayscale completion of a binary PGM image.
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 30)]
        k: usize,
        /// Fraction of observed pixels.
        #[arg(long, default_value_t = 0.33)]
        observe: f64,
        /// Measure SNR against the best rank-k approximation of the image.
        #[arg(long)]
        best_rank_k: bool,
        /// Where to write the recovered image.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Monte-Carlo estimate of the rank-restricted isometry constant.
    ProbeRip {
        #[arg(long, default_value_t = 32)]
        m: usize,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        sr: f64,
        #[arg(long, value_enum, default_value = "structured")]
        operator: OperatorArg,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.3)]
    sr: f64,
    /// `‖e‖_2` of the additive noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Algorithms to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "alps2")]
    algo: Vec<AlgoArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Rank-k projection engine.
    #[arg(long, value_enum, default_value = "exact")]
    proj: ProjArg,
    /// Power iterations of the randomized engine.
    #[arg(long, default_value_t = 2)]
    q: usize,
    /// Oversampling of the randomized engine.
    #[arg(long, default_value_t = 5)]
    oversample: usize,
    /// Approximation slack of the column-subset engine.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, value_enum, default_value = "adaptive")]
    momentum: MomentumArg,
    /// Constant momentum step.
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Nesterov inverse condition-number guess.
    #[arg(long, default_value_t = 1.0)]
    nesterov_q: f64,
    #[arg(long, value_enum, default_value = "ortho")]
    union: UnionArg,
    #[arg(long, value_enum, default_value = "exact")]
    projmode: ProjModeArg,
    #[arg(long, default_value_t = 5e-5)]
    tol: f64,
    /// Defaults to 500 (700 for completion sweeps).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Constant SVP step.
    #[arg(long, default_value_t = 1.0)]
    svp_mu: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AlgoArg {
    Alps1,
    Alps1Nodebias,
    Admira,
    Alps2,
    Alps2Qr,
    Svp,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Alps1 => Algorithm::Alps1,
            AlgoArg::Alps1Nodebias => Algorithm::Alps1Nodebias,
            AlgoArg::Admira => Algorithm::Admira,
            AlgoArg::Alps2 => Algorithm::Alps2,
            AlgoArg::Alps2Qr => Algorithm::Alps2Qr,
            AlgoArg::Svp => Algorithm::Svp,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProjArg {
    Exact,
    #[value(alias = "rand")]
    Randomized,
    #[value(alias = "css")]
    ColumnSubset,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MomentumArg {
    Adaptive,
    Constant,
    Nesterov,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum UnionArg {
    Ortho,
    Raw,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProjModeArg {
    Exact,
    Left,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OperatorArg {
    Structured,
    Mask,
    Identity,
}

impl From<OperatorArg> for OperatorKind {
    fn from(o: OperatorArg) -> Self {
        match o {
            OperatorArg::Structured => OperatorKind::Structured,
            OperatorArg::Mask => OperatorKind::Mask,
            OperatorArg::Identity => OperatorKind::Identity,
        }
    }
}

impl SolverArgs {
    fn config(&self, algorithm: Algorithm, k: usize, default_iters: usize, seed: u64) -> SolverConfig {
        let projector = ProjectorSpec {
            mode: match self.proj {
                ProjArg::Exact => ProjectionMode::Exact,
                ProjArg::Randomized => ProjectionMode::RandomizedPower,
                ProjArg::ColumnSubset => ProjectionMode::ColumnSubset,
            },
            q: self.q,
            oversample: self.oversample,
            epsilon: self.eps,
            ..ProjectorSpec::exact(k)
        };
        let momentum = match self.momentum {
            MomentumArg::Adaptive => MomentumPolicy::adaptive(),
            MomentumArg::Constant => MomentumPolicy::constant(self.tau),
            MomentumArg::Nesterov => MomentumPolicy::nesterov(self.nesterov_q, 0.5),
        };
        SolverConfig::new(algorithm, k)
            .with_projector(projector)
            .with_momentum(momentum)
            .with_union(match self.union {
                UnionArg::Ortho => UnionMode::Ortho,
                UnionArg::Raw => UnionMode::Raw,
            })
            .with_projection_mode(match self.projmode {
                ProjModeArg::Exact => SubspaceProjection::ExactTwoSided,
                ProjModeArg::Left => SubspaceProjection::LeftInexact,
            })
            .with_tol(self.tol)
            .with_max_iters(self.max_iters.unwrap_or(default_iters))
            .with_svp_mu(self.svp_mu)
            .with_seed(seed)
    }
}

/// Distinguishes solver divergence from other failures.
#[derive(Debug)]
struct Diverged(String);

impl std::fmt::Display for Diverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Diverged {}

fn lift(e: lowrank::Error) -> anyhow::Error {
    match e {
        lowrank::Error::Divergence { .. } => Diverged(e.to_string()).into(),
        other => other.into(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn sweep(args: &SweepArgs, kind: OperatorKind, default_iters: usize) -> Result<()> {
    let spec = ProblemSpec::new(args.m, args.n, args.k, args.sr)
        .with_noise(args.noise)
        .with_operator(kind)
        .with_trials(args.trials)
        .with_seed(args.seed);
    let configs: Vec<SolverConfig> = args
        .algo
        .iter()
        .map(|&a| args.solver.config(a.into(), args.k, default_iters, args.seed))
        .collect();
    let reports = run_monte_carlo(&spec, &configs).map_err(lift)?;
    let text = match args.format {
        FormatArg::Json => serde_json::to_string_pretty(&reports)? + "\n",
        FormatArg::Csv => emit_table(&reports, TableFormat::Csv).map_err(lift)?,
        FormatArg::Text => emit_table(&reports, TableFormat::Text).map_err(lift)?,
    };
    emit(&args.out, &text)?;
    let diverged: usize = reports.iter().map(|r| r.diverged_trials).sum();
    if diverged > 0 {
        return Err(Diverged(format!("{diverged} trial(s) diverged")).into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Arm(args) => sweep(&args, OperatorKind::Structured, 500),
        Command::Mc(args) => sweep(&args, OperatorKind::Mask, 700),
        Command::Toy { algo } => {
            let x = run_toy_example(algo.into()).map_err(lift)?;
            for i in 0..x.rows() {
                let row: Vec<String> = x.row(i).iter().map(|v| format!("{}", v + 0.0)).collect();
                println!("{}", row.join(" "));
            }
            Ok(())
        }
        Command::Denoise {
            input,
            k,
            observe,
            best_rank_k,
            output,
            seed,
            solver,
        } => {
            let config = solver.config(Algorithm::Alps2, k, 500, seed);
            let reference = if best_rank_k {
                SnrReference::BestRankK
            } else {
                SnrReference::Original
            };
            let out = denoise_image(&input, k, observe, &config, seed, reference).map_err(lift)?;
            if let Some(path) = output {
                write_pgm(&path, &out.estimate).map_err(lift)?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "snr_db": out.snr_db,
                    "observed": out.observed,
                    "iterations": out.report.iterations,
                    "elapsed_s": out.report.elapsed_s,
                })
            );
            Ok(())
        }
        Command::ProbeRip {
            m,
            n,
            k,
            sr,
            operator,
            trials,
            seed,
        } => {
            let spec = ProblemSpec::new(m, n, k, sr)
                .with_operator(operator.into())
                .with_seed(seed);
            let problem = generate_problem::<f64>(&spec).map_err(lift)?;
            let est = rip_probe(&problem.operator, k, trials, seed).map_err(lift)?;
            println!(
                "{}",
                serde_json::json!({
                    "lower": est.lower,
                    "upper": est.upper,
                    "delta": est.delta(),
                })
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Diverged>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
