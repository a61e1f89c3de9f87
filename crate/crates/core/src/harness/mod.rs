//! Problem generation, Monte-Carlo sweeps, tables, the toy completion example
//! and image completion.

mod image;
mod monte_carlo;
mod problem;
mod table;
mod toy;

pub use image::{
    denoise_image, denoise_matrix, encode_pgm, parse_pgm, read_pgm, snr_db, write_pgm, DenoiseOutcome, SnrReference,
};
pub use monte_carlo::{median, run_monte_carlo, RunReport, TrialResult};
pub use problem::{generate_problem, generate_trial, Problem, ProblemSpec};
pub use table::{emit_table, TableFormat, TABLE_COLUMNS};
pub use toy::{run_toy_example, toy_config, toy_mask, toy_truth, TOY_ITERATIONS, TOY_RANK};
