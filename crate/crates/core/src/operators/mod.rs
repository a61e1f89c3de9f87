//! Linear measurement maps `A: R^{m x n} -> R^p` and their adjoints.

mod fwht;
mod mask;
mod rip;
mod structured;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::scalar::Scalar;

pub use fwht::fwht_orthonormal;
pub use mask::MaskOperator;
pub use rip::{rip_probe, rip_probe_with, ProbeFamily, RipEstimate};
pub use structured::StructuredOperator;

/// A linear map from `m x n` matrices to `p` measurements.
pub trait LinearOperator<T: Scalar>: Send + Sync {
    /// Signal shape `(m, n)`.
    fn signal_dims(&self) -> (usize, usize);

    /// Measurement count `p`.
    fn measurements(&self) -> usize;

    fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>>;

    fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>>;

    fn check_signal(&self, x: &DenseMatrix<T>) -> Result<()> {
        let (m, n) = self.signal_dims();
        if x.shape() != (m, n) {
            return Err(mismatch(
                format!("{m}x{n} signal"),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    fn check_measurements(&self, v: &[T]) -> Result<()> {
        if v.len() != self.measurements() {
            return Err(mismatch(
                format!("{} measurements", self.measurements()),
                format!("{}", v.len()),
            ));
        }
        Ok(())
    }
}

/// The identity map `X -> vec(X)` (row-major), `p = m n`.
#[derive(Clone, Debug)]
pub struct IdentityOperator {
    m: usize,
    n: usize,
}

impl IdentityOperator {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }
}

impl<T: Scalar> LinearOperator<T> for IdentityOperator {
    fn signal_dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn measurements(&self) -> usize {
        self.m * self.n
    }

    fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>> {
        self.check_signal(x)?;
        Ok(x.as_slice().to_vec())
    }

    fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>> {
        <Self as LinearOperator<T>>::check_measurements(self, v)?;
        DenseMatrix::from_vec(self.m, self.n, v.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Mask,
    Structured,
    Identity,
}

/// Reproducible description of an operator; the sampling pattern is
/// regenerated from `seed` and never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub kind: OperatorKind,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
}

impl OperatorDescriptor {
    pub fn build<T: Scalar>(&self) -> Result<Operator<T>> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let mut op = match self.kind {
            OperatorKind::Mask => Operator::Mask(MaskOperator::random(self.m, self.n, self.p, &mut rng)?),
            OperatorKind::Structured => {
                Operator::Structured(StructuredOperator::random(self.m, self.n, self.p, &mut rng)?)
            }
            OperatorKind::Identity => {
                if self.p != self.m * self.n {
                    return Err(Error::InvalidInput(format!(
                        "identity operator needs p = m*n = {}, got {}",
                        self.m * self.n,
                        self.p
                    )));
                }
                Operator::Identity(IdentityOperator::new(self.m, self.n))
            }
        };
        op.set_descriptor(self.clone());
        Ok(op)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Closed set of concrete operators.
#[derive(Clone, Debug)]
pub enum Operator<T> {
    Mask(MaskOperator),
    Structured(StructuredOperator<T>),
    Identity(IdentityOperator),
}

impl<T: Scalar> Operator<T> {
    pub fn kind(&self) -> OperatorKind {
        match self {
            Operator::Mask(_) => OperatorKind::Mask,
            Operator::Structured(_) => OperatorKind::Structured,
            Operator::Identity(_) => OperatorKind::Identity,
        }
    }

    /// Descriptor this operator was built from, if any.
    pub fn descriptor(&self) -> Option<&OperatorDescriptor> {
        match self {
            Operator::Mask(op) => op.descriptor.as_ref(),
            Operator::Structured(op) => op.descriptor.as_ref(),
            Operator::Identity(_) => None,
        }
    }

    fn set_descriptor(&mut self, d: OperatorDescriptor) {
        match self {
            Operator::Mask(op) => op.descriptor = Some(d),
            Operator::Structured(op) => op.descriptor = Some(d),
            Operator::Identity(_) => {}
        }
    }

    /// Builds an operator of `kind` with `p` measurements from a fresh seed
    /// drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(
        kind: OperatorKind,
        m: usize,
        n: usize,
        p: usize,
        rng: &mut R,
    ) -> Result<Self> {
        OperatorDescriptor {
            kind,
            m,
            n,
            p,
            seed: rng.gen(),
        }
        .build()
    }
}

impl<T: Scalar> LinearOperator<T> for Operator<T> {
    fn signal_dims(&self) -> (usize, usize) {
        match self {
            Operator::Mask(op) => LinearOperator::<T>::signal_dims(op),
            Operator::Structured(op) => op.signal_dims(),
            Operator::Identity(op) => LinearOperator::<T>::signal_dims(op),
        }
    }

    fn measurements(&self) -> usize {
        match self {
            Operator::Mask(op) => LinearOperator::<T>::measurements(op),
            Operator::Structured(op) => op.measurements(),
            Operator::Identity(op) => LinearOperator::<T>::measurements(op),
        }
    }

    fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>> {
        match self {
            Operator::Mask(op) => op.apply(x),
            Operator::Structured(op) => op.apply(x),
            Operator::Identity(op) => op.apply(x),
        }
    }

    fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>> {
        match self {
            Operator::Mask(op) => op.adjoint(v),
            Operator::Structured(op) => op.adjoint(v),
            Operator::Identity(op) => op.adjoint(v),
        }
    }
}

/// Measurements `y = A X* + e`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Observation<T> {
    pub y: Vec<T>,
    /// `‖e‖_2` used at generation time; zero when noiseless or unknown.
    pub noise_energy: T,
}

/// `y − A X`.
pub fn residual<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    x: &DenseMatrix<T>,
) -> Result<Vec<T>> {
    op.check_measurements(y)?;
    let ax = op.apply(x)?;
    Ok(y.iter().zip(&ax).map(|(&a, &b)| a - b).collect())
}

/// Data error `f(X) = ‖y − A X‖²`.
pub fn data_error<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    x: &DenseMatrix<T>,
) -> Result<T> {
    let r = residual(op, y, x)?;
    Ok(dot(&r, &r))
}

/// `∇f(X) = −2 A*(y − A X)`.
pub fn gradient<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    y: &[T],
    x: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>> {
    let r = residual(op, y, x)?;
    let mut g = op.adjoint(&r)?;
    g.scale_in_place(-T::of(2.0));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_vectorizes_row_major() {
        let op = IdentityOperator::new(2, 3);
        let x = DenseMatrix::from_fn(2, 3, |i, j| (3 * i + j) as f64);
        assert_eq!(op.apply(&x).unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(op.adjoint(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), x);
    }

    #[test]
    fn identity_gradient_is_twice_difference() {
        let op = IdentityOperator::new(2, 2);
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let target = DenseMatrix::from_rows(&[vec![0.5, -1.0], vec![3.0, 0.0]]).unwrap();
        let g = gradient(&op, target.as_slice(), &x).unwrap();
        assert!(g.max_abs_diff(&(&x - &target).scale(2.0)) < 1e-15);
    }

    #[test]
    fn zero_residual_gives_zero_gradient() {
        let desc = OperatorDescriptor {
            kind: OperatorKind::Structured,
            m: 4,
            n: 4,
            p: 7,
            seed: 9,
        };
        let op: Operator<f64> = desc.build().unwrap();
        let x = DenseMatrix::from_fn(4, 4, |i, j| (i as f64) - 0.5 * j as f64);
        let y = op.apply(&x).unwrap();
        assert!(gradient(&op, &y, &x).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn descriptor_json_round_trip_regenerates_operator() {
        let desc = OperatorDescriptor {
            kind: OperatorKind::Mask,
            m: 5,
            n: 6,
            p: 11,
            seed: 42,
        };
        let back = OperatorDescriptor::from_json(&desc.to_json().unwrap()).unwrap();
        assert_eq!(back, desc);
        let (a, b): (Operator<f64>, Operator<f64>) = (desc.build().unwrap(), back.build().unwrap());
        let x = DenseMatrix::from_fn(5, 6, |i, j| (i * 6 + j) as f64);
        assert_eq!(a.apply(&x).unwrap(), b.apply(&x).unwrap());
        assert_eq!(a.descriptor(), Some(&desc));
    }

    #[test]
    fn shape_errors() {
        let op = IdentityOperator::new(2, 2);
        assert!(LinearOperator::<f64>::apply(&op, &DenseMatrix::zeros(2, 3)).is_err());
        assert!(LinearOperator::<f64>::adjoint(&op, &[1.0; 3]).is_err());
        assert!(gradient(&op, &[0.0; 3], &DenseMatrix::<f64>::zeros(2, 2)).is_err());
    }
}
