use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{generate_trial, ProblemSpec};
use crate::error::{Error, Result};
use crate::solvers::{solve, Algorithm, SolverConfig, Termination};

/// Outcome of one solver on one problem realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    /// `‖X̂ − X*‖_F / ‖X*‖_F`; infinite when the run diverged.
    pub final_error: f64,
    pub elapsed_s: f64,
    pub termination: Option<Termination>,
    /// Divergence message, when the solver aborted.
    pub diverged: Option<String>,
    /// Relative error after every iteration.
    pub error_trace: Vec<f64>,
}

/// All trials of one configuration plus their medians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: ProblemSpec,
    pub config: SolverConfig,
    pub p: usize,
    pub fr: f64,
    pub trials: Vec<TrialResult>,
    pub median_iterations: f64,
    pub median_error: f64,
    pub median_time_s: f64,
    pub diverged_trials: usize,
}

impl RunReport {
    fn from_trials(problem: &ProblemSpec, config: &SolverConfig, trials: Vec<TrialResult>) -> Self {
        let col = |f: fn(&TrialResult) -> f64| median(&trials.iter().map(f).collect::<Vec<_>>());
        Self {
            problem: problem.clone(),
            config: config.clone(),
            p: problem.p(),
            fr: problem.fr(),
            median_iterations: col(|t| t.iterations as f64),
            median_error: col(|t| t.final_error),
            median_time_s: col(|t| t.elapsed_s),
            diverged_trials: trials.iter().filter(|t| t.diverged.is_some()).count(),
            trials,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.config.algorithm
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Copy with wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.median_time_s = 0.0;
        for t in &mut r.trials {
            t.elapsed_s = 0.0;
        }
        r
    }
}

/// Median; the mean of the two middle values for even lengths, NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        (v[h - 1] + v[h]) / 2.0
    }
}

/// Runs every config on `spec.trials` shared problem realizations.
///
/// Trials run in parallel; results are ordered by trial index so reports do
/// not depend on scheduling. A diverging solver is recorded in its trial and
/// the sweep continues.
pub fn run_monte_carlo(spec: &ProblemSpec, configs: &[SolverConfig]) -> Result<Vec<RunReport>> {
    spec.validate()?;
    for c in configs {
        c.validate()?;
    }
    let per_trial: Vec<Vec<TrialResult>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, configs, trial))
        .collect::<Result<_>>()?;
    Ok(configs
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let trials = per_trial.iter().map(|row| row[ci].clone()).collect();
            RunReport::from_trials(spec, c, trials)
        })
        .collect())
}

fn run_trial(spec: &ProblemSpec, configs: &[SolverConfig], trial: usize) -> Result<Vec<TrialResult>> {
    let problem = generate_trial::<f64>(spec, trial)?;
    let x_norm = problem.x_true.frobenius_norm();
    configs
        .iter()
        .map(|config| {
            let seed = spec.trial_seed(trial);
            let config = config.clone().with_seed(config.seed ^ seed);
            match solve(&problem.operator, &problem.observation.y, &config, Some(&problem.x_true)) {
                Ok((_, report)) => Ok(TrialResult {
                    trial,
                    seed,
                    iterations: report.iterations,
                    final_error: report.final_error.unwrap_or(f64::NAN) / x_norm,
                    elapsed_s: report.elapsed_s,
                    termination: Some(report.termination),
                    diverged: None,
                    error_trace: report
                        .trace
                        .iter()
                        .map(|r| r.err_vs_truth.unwrap_or(f64::NAN) / x_norm)
                        .collect(),
                }),
                Err(Error::Divergence { iteration, reason }) => Ok(TrialResult {
                    trial,
                    seed,
                    iterations: iteration,
                    final_error: f64::INFINITY,
                    elapsed_s: 0.0,
                    termination: None,
                    diverged: Some(reason),
                    error_trace: Vec::new(),
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_even_empty() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        assert_eq!(median(&[1.0, f64::INFINITY, 2.0]), 2.0);
    }
}
