//! The 5 x 4 rank-2 completion example whose mask does not satisfy a rank RIP.

use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::operators::{LinearOperator, MaskOperator};
use crate::solvers::{solve, Algorithm, MomentumPolicy, SolverConfig, SubspaceProjection, UnionMode};

pub const TOY_RANK: usize = 2;
pub const TOY_ITERATIONS: usize = 300;

/// The integer target matrix.
pub fn toy_truth() -> DenseMatrix<f64> {
    DenseMatrix::from_rows(&[
        vec![2.0, 2.0, 1.0, 1.0],
        vec![2.0, 2.0, 1.0, 1.0],
        vec![2.0, 2.0, 1.0, 1.0],
        vec![2.0, 2.0, 1.0, 1.0],
        vec![1.0, 1.0, 2.0, 1.0],
    ])
    .expect("rectangular literal")
}

/// Rows 0, 1 and 4 fully observed; row 2 only in column 3; row 3 in columns 0 and 3.
pub fn toy_mask() -> MaskOperator {
    let mut coords = Vec::new();
    for i in [0, 1, 4] {
        for j in 0..4 {
            coords.push((i, j));
        }
    }
    coords.extend([(2, 3), (3, 0), (3, 3)]);
    MaskOperator::from_coords(5, 4, &coords).expect("valid toy mask")
}

/// Solver settings used for the toy run: rank 2, a fixed iteration budget, a
/// stopping threshold that only triggers on an exact fixed point, one-sided
/// projections with an unorthogonalized memory union, and constant momentum
/// `τ = 1/4`.
pub fn toy_config(algorithm: Algorithm) -> SolverConfig {
    SolverConfig::new(algorithm, TOY_RANK)
        .with_max_iters(TOY_ITERATIONS)
        .with_tol(f64::MIN_POSITIVE)
        .with_projection_mode(SubspaceProjection::LeftInexact)
        .with_union(UnionMode::Raw)
        .with_momentum(MomentumPolicy::constant(0.25))
        .with_svp_mu(1.0)
}

/// Runs `algorithm` on the toy instance and returns the rounded recovery.
pub fn run_toy_example(algorithm: Algorithm) -> Result<DenseMatrix<f64>> {
    let op = toy_mask();
    let y = op.apply(&toy_truth())?;
    let (x, _) = solve(&op, &y, &toy_config(algorithm), None)?;
    Ok(x.round())
}
