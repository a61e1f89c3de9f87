//! Low-rank matrix recovery by hard thresholding.
//!
//! The crate recovers a rank-`k` matrix `X*` from linear measurements
//! `y = A X* + e` with a family of projected-gradient solvers that share one
//! projection calculus, pluggable measurement operators, and interchangeable
//! rank-`k` projection engines. All numerics are generic over [`Scalar`]
//! (`f32` or `f64`); the aliases below fix the common `f64` instantiation.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod projection;
mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type Basis = linalg::SubspaceBasis<f64>;
pub type Operator = operators::Operator<f64>;
pub use solvers::SolverConfig;
