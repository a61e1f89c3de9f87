//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::Instant;

use common::*;
use lowrank::harness::{generate_trial, run_monte_carlo, run_toy_example, toy_truth, ProblemSpec, RunReport};
use lowrank::linalg::{best_rank_k, DenseMatrix, SubspaceBasis};
use lowrank::operators::{
    data_error, gradient, rip_probe, IdentityOperator, LinearOperator, OperatorDescriptor, OperatorKind,
};
use lowrank::projection::{project, ProjectorSpec};
use lowrank::solvers::{momentum_tau, solve, step_size_mu, Algorithm, MomentumPolicy, SolverConfig, SubspaceProjection};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn arm_spec() -> ProblemSpec {
    ProblemSpec::new(256, 512, 5, 0.3).with_operator(OperatorKind::Structured).with_trials(10).with_seed(1)
}

fn summary(r: &RunReport) -> String {
    format!("{} err {:.2e} it {}", r.algorithm(), r.median_error, r.median_iterations)
}

fn toy() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alg in [Algorithm::Alps2, Algorithm::Admira, Algorithm::Svp, Algorithm::Alps1] {
        let t = Instant::now();
        let exact = run_toy_example(alg).map(|x| x == toy_truth()).unwrap_or(false);
        let secs = t.elapsed().as_secs_f64();
        pass &= exact && secs < 1.0;
        parts.push(format!("{alg} exact={exact} {secs:.3}s"));
    }
    outcome(pass, parts.join(", "))
}

fn structured_table() -> Outcome {
    let t = Instant::now();
    let configs = [
        SolverConfig::new(Algorithm::Alps2, 5),
        SolverConfig::new(Algorithm::Alps1, 5),
        SolverConfig::new(Algorithm::Admira, 5),
    ];
    let reports = run_monte_carlo(&arm_spec(), &configs).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let limits = [20.0, 30.0, 60.0];
    let pass = reports.iter().zip(limits).all(|(r, it)| r.median_error <= 1e-4 && r.median_iterations <= it)
        && secs < 120.0;
    let parts: Vec<String> = reports.iter().map(summary).collect();
    outcome(pass, format!("{}, {secs:.1}s", parts.join("; ")))
}

fn completion_table() -> Outcome {
    let t = Instant::now();
    let spec = ProblemSpec::new(300, 600, 5, 0.3).with_operator(OperatorKind::Mask).with_trials(10).with_seed(2);
    let cfg = [SolverConfig::new(Algorithm::Alps2, 5)];
    let clean = &run_monte_carlo(&spec, &cfg).unwrap()[0];
    let noisy = &run_monte_carlo(&spec.clone().with_noise(1e-3), &cfg).unwrap()[0];
    let secs = t.elapsed().as_secs_f64();
    let pass = clean.median_error <= 1e-4
        && clean.median_iterations <= 30.0
        && noisy.median_error <= 5e-3
        && secs < 120.0;
    outcome(pass, format!("noiseless {}; noisy err {:.2e}, {secs:.1}s", summary(clean), noisy.median_error))
}

fn noise_floor() -> Outcome {
    let cfg = [SolverConfig::new(Algorithm::Alps2, 5)];
    let errs: Vec<f64> = [1e-3, 1e-4, 0.0]
        .iter()
        .map(|&e| run_monte_carlo(&arm_spec().with_seed(3).with_noise(e), &cfg).unwrap()[0].median_error)
        .collect();
    outcome(
        errs[0] > errs[1] && errs[1] > errs[2],
        format!("median errors at 1e-3, 1e-4, 0: {:.2e}, {:.2e}, {:.2e}", errs[0], errs[1], errs[2]),
    )
}

fn step_optimality() -> Outcome {
    let mut worst_mu = 0.0f64;
    let mut worst_tau = 0.0f64;
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let (m, n) = (10, 12);
        let kind = if seed % 2 == 0 { OperatorKind::Mask } else { OperatorKind::Structured };
        let a = OperatorDescriptor { kind, m, n, p: 60, seed }.build::<f64>().unwrap();
        let y = a.apply(&low_rank(m, n, 2, &mut r)).unwrap();
        let x = low_rank(m, n, 2, &mut r).scale(0.3);
        let g = gradient(&a, &y, &x).unwrap();
        let (sx, _) = best_rank_k(&x, 2).unwrap();
        let (sd, _) = best_rank_k(&sx.project_complement(&g).unwrap(), 2).unwrap();
        let s = sd.ortho_union(&sx).unwrap();
        let pg = s.project(&g).unwrap();
        let mu = step_size_mu(&a, &s, &g, SubspaceProjection::ExactTwoSided).unwrap().unwrap();
        let f = |t: f64| data_error(&a, &y, &(&x - &pg.scale(t / 2.0))).unwrap();
        let gs = golden_section(f, 0.0, 100.0, 1e-12);
        worst_mu = worst_mu.max((mu - gs).abs() / mu.abs().max(1.0));

        let x_prev = low_rank(m, n, 2, &mut r);
        let (ac, ap) = (a.apply(&x).unwrap(), a.apply(&x_prev).unwrap());
        let tau: f64 = momentum_tau(&MomentumPolicy::adaptive(), &y, &ac, &ap, &mut 0.5).unwrap();
        let d = &x - &x_prev;
        let h = |t: f64| data_error(&a, &y, &(&x + &d.scale(t))).unwrap();
        let gs = golden_section(h, -100.0, 100.0, 1e-12);
        worst_tau = worst_tau.max((tau - gs).abs() / tau.abs().max(1.0));
    }
    outcome(
        worst_mu <= 1e-6 && worst_tau <= 1e-6,
        format!("worst relative gap mu {worst_mu:.1e}, tau {worst_tau:.1e}"),
    )
}

fn random_basis(m: usize, n: usize, rl: usize, rr: usize, r: &mut rand_chacha::ChaCha8Rng) -> SubspaceBasis<f64> {
    let mut cols = |len: usize, c: usize| {
        let g = gaussian(len, c, r);
        let q = gram_schmidt(&(0..c).map(|j| g.column(j)).collect::<Vec<_>>());
        DenseMatrix::from_fn(len, q.len(), |i, j| q[j][i])
    };
    let u = cols(m, rl);
    let v = cols(n, rr);
    SubspaceBasis::from_orthonormal(u, v).unwrap()
}

fn projection_calculus() -> Outcome {
    let mut fails = [0usize; 4];
    for seed in 0..100u64 {
        let mut r = rng(seed + 40_000);
        let (m, n) = (r.gen_range(2..9), r.gen_range(2..9));
        let (rl, rr) = (r.gen_range(0..=m), r.gen_range(0..=n));
        let s = random_basis(m, n, rl, rr, &mut r);
        let x = gaussian(m, n, &mut r);
        let p = s.project(&x).unwrap();
        let c = s.project_complement(&x).unwrap();
        if s.project(&p).unwrap().max_abs_diff(&p) > 1e-10 {
            fails[0] += 1;
        }
        if (&p + &c).max_abs_diff(&x) > 1e-10 || p.dot(&c).abs() > 1e-10 * x.frobenius_norm_sq().max(1.0) {
            fails[1] += 1;
        }
        if p.frobenius_norm() > x.frobenius_norm() * (1.0 + 1e-12) {
            fails[2] += 1;
        }
        let k = r.gen_range(1..=m.min(n));
        let (_, xk) = best_rank_k(&x, k).unwrap();
        let best = (&xk - &x).frobenius_norm();
        if (0..200).any(|_| (&low_rank(m, n, k, &mut r) - &x).frobenius_norm() < best - 1e-9) {
            fails[3] += 1;
        }
    }
    outcome(
        fails.iter().all(|&f| f == 0),
        format!("failures idempotent/decomposition/contraction/eckart-young: {fails:?} of 100"),
    )
}

fn projection_engines() -> Outcome {
    let mut capture_fail = 0;
    for seed in 0..100u64 {
        let x = low_rank(30, 20, 3, &mut rng(seed + 50_000));
        let (_, xh) = project(&ProjectorSpec::randomized(3, (seed % 4) as usize, seed), &x).unwrap();
        if (&x - &xh).frobenius_norm() > 1e-8 * x.frobenius_norm() {
            capture_fail += 1;
        }
    }
    let spectrum: Vec<f64> = (0..30).map(|i| 0.5f64.powi(i)).collect();
    let mut wins = 0;
    for t in 0..100u64 {
        let x = with_spectrum(40, 30, &spectrum, &mut rng(t + 60_000));
        let resid = |q| {
            let (_, xh) = project(&ProjectorSpec::randomized(3, q, t), &x).unwrap();
            (&x - &xh).frobenius_norm()
        };
        if resid(3) < resid(0) {
            wins += 1;
        }
    }
    let mut css = vec![0.1; 64];
    css[0] = 1.0;
    css[1] = 0.9;
    let eps = 0.5;
    let mut hits = 0;
    for t in 0..100u64 {
        let x = with_spectrum(64, 64, &css, &mut rng(t + 70_000));
        let (_, xh) = project(&ProjectorSpec::column_subset(2, eps, t), &x).unwrap();
        let opt: f64 = oracle_singular_values(&x)[2..].iter().map(|s| s * s).sum();
        if (&xh - &x).frobenius_norm_sq() <= (1.0 + eps) * opt {
            hits += 1;
        }
    }
    outcome(
        capture_fail == 0 && wins >= 90 && hits >= 75,
        format!("capture failures {capture_fail}/100, q=3 wins {wins}/100, column subset {hits}/100"),
    )
}

fn rip_sanity() -> Outcome {
    let id = IdentityOperator::new(32, 32);
    let d_id = rip_probe::<f64, _>(&id, 2, 50, 1).unwrap().delta();
    let spec = ProblemSpec::new(32, 32, 2, 0.3).with_operator(OperatorKind::Structured).with_seed(4);
    let mut worst = 0.0f64;
    let mut all_ok = true;
    for t in 0..5 {
        let p = generate_trial::<f64>(&spec, t).unwrap();
        let d = rip_probe(&p.operator, 2, 200, 7).unwrap().delta();
        all_ok &= d < 1.0;
        worst = worst.max(d);
        for alg in [Algorithm::Alps1, Algorithm::Alps2] {
            let (_, rep) = solve(&p.operator, &p.observation.y, &SolverConfig::new(alg, 2), None).unwrap();
            all_ok &= rep
                .trace
                .iter()
                .filter_map(|r| r.steps.mu)
                .all(|mu| 1.0 / mu >= 1.0 - d && 1.0 / mu <= 1.0 + d + 0.1);
        }
    }
    outcome(
        d_id <= 1e-12 && all_ok,
        format!("identity delta {d_id:.1e}, structured delta up to {worst:.3}, step bounds held: {all_ok}"),
    )
}

fn debias_effect() -> Outcome {
    let configs = [SolverConfig::new(Algorithm::Alps1, 5), SolverConfig::new(Algorithm::Alps1Nodebias, 5)];
    let r = run_monte_carlo(&arm_spec(), &configs).unwrap();
    let slower = r[0].trials.iter().zip(&r[1].trials).filter(|(a, b)| b.iterations >= a.iterations).count();
    outcome(
        r[1].median_error <= 1e-3 && slower >= 7,
        format!("{}; {}; nodebias not faster in {slower}/10", summary(&r[0]), summary(&r[1])),
    )
}

fn determinism() -> Outcome {
    let spec = ProblemSpec::new(40, 60, 3, 0.4).with_noise(1e-4).with_trials(3).with_seed(5);
    let configs: Vec<SolverConfig> = Algorithm::ALL.iter().map(|&a| SolverConfig::new(a, 3).with_seed(9)).collect();
    let a = run_monte_carlo(&spec, &configs).unwrap();
    let b = run_monte_carlo(&spec, &configs).unwrap();
    let same = a.iter().zip(&b).all(|(x, y)| x.without_timing() == y.without_timing());
    let p = generate_trial::<f64>(&spec, 0).unwrap();
    let cfg = SolverConfig::new(Algorithm::Alps2Qr, 3).with_seed(9);
    let (x1, r1) = solve(&p.operator, &p.observation.y, &cfg, Some(&p.x_true)).unwrap();
    let (x2, r2) = solve(&p.operator, &p.observation.y, &cfg, Some(&p.x_true)).unwrap();
    let solve_same = x1 == x2 && r1.without_timing() == r2.without_timing();
    outcome(same && solve_same, format!("run reports identical: {same}, solve reports identical: {solve_same}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("toy example exactness", toy),
        ("structured operator table", structured_table),
        ("matrix completion table", completion_table),
        ("noise floor scaling", noise_floor),
        ("step size and momentum optimality", step_optimality),
        ("projection calculus", projection_calculus),
        ("randomized and column-subset engines", projection_engines),
        ("rip probe sanity", rip_sanity),
        ("de-bias effect", debias_effect),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {tag}: {name} ({})", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
