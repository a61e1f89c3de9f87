use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::Algorithm;
use crate::error::Result;

/// One row of the per-iteration trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// `‖X(i) − X(i−1)‖_F / ‖X(i)‖_F`.
    pub rel_change: f64,
    /// `f(X(i)) = ‖y − A X(i)‖²`.
    pub f_value: f64,
    /// `‖X(i) − X*‖_F` when ground truth was supplied.
    pub err_vs_truth: Option<f64>,
    pub elapsed_ms: f64,
    #[serde(default)]
    pub steps: StepDiagnostics,
}

/// Step sizes and line-search values observed in one iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub mu: Option<f64>,
    pub xi: Option<f64>,
    pub tau: Option<f64>,
    /// `f(W(i))` before the de-bias step.
    pub f_selected: Option<f64>,
    /// `f` right after the de-bias step, before re-truncation.
    pub f_debiased: Option<f64>,
    /// Inner CG iterations of the least-squares step.
    pub cg_iters: Option<usize>,
    /// Whether the inner CG reached its tolerance.
    pub cg_converged: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Relative change fell below `tol`.
    Tolerance,
    /// The projected gradient vanished.
    ZeroGradient,
    MaxIterations,
}

/// Outcome of a single solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub k: usize,
    pub iterations: usize,
    pub termination: Termination,
    pub final_f: f64,
    pub final_error: Option<f64>,
    pub elapsed_s: f64,
    pub trace: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per iteration: `iter,rel_change,f_value,err_vs_truth,elapsed_ms`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "rel_change", "f_value", "err_vs_truth", "elapsed_ms"])?;
        for r in &self.trace {
            w.write_record([
                r.iter.to_string(),
                format!("{:e}", r.rel_change),
                format!("{:e}", r.f_value),
                r.err_vs_truth.map(|e| format!("{e:e}")).unwrap_or_default(),
                format!("{:.3}", r.elapsed_ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.elapsed_s = 0.0;
        for rec in &mut r.trace {
            rec.elapsed_ms = 0.0;
        }
        r
    }
}
