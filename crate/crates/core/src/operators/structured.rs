use rand::seq::SliceRandom;
use rand::Rng;

use super::fwht::fwht_orthonormal;
use super::mask::sample_without_replacement;
use super::{LinearOperator, OperatorDescriptor};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Randomly sign-flipped, permuted, subsampled Walsh–Hadamard transform.
///
/// `A X = S H P D vec(X)` where `D` flips signs, `P` permutes, `H` is the
/// orthonormal Hadamard transform of length `N` (the next power of two at or
/// above `m n`, with zero padding) and `S` keeps `p` sorted rows. Rows of `A`
/// are orthonormal, so `A A* = I` and `E‖A X‖² = (p/N) ‖X‖²`.
#[derive(Clone, Debug)]
pub struct StructuredOperator<T> {
    m: usize,
    n: usize,
    len: usize,
    signs: Vec<T>,
    /// `perm[i]` is the slot that coordinate `i` moves to.
    perm: Vec<usize>,
    samples: Vec<usize>,
    pub(super) descriptor: Option<OperatorDescriptor>,
}

impl<T: Scalar> StructuredOperator<T> {
    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, p: usize, rng: &mut R) -> Result<Self> {
        let len = (m * n).next_power_of_two();
        if m * n == 0 || p == 0 || p > m * n {
            return Err(Error::InvalidInput(format!(
                "structured operator needs 1 <= p <= m*n = {}, got {p}",
                m * n
            )));
        }
        let signs = (0..len)
            .map(|_| if rng.gen::<bool>() { T::one() } else { -T::one() })
            .collect();
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(rng);
        let mut samples = sample_without_replacement(len, p, rng);
        samples.sort_unstable();
        Ok(Self {
            m,
            n,
            len,
            signs,
            perm,
            samples,
            descriptor: None,
        })
    }

    /// Padded transform length `N`.
    pub fn transform_len(&self) -> usize {
        self.len
    }

    /// Full unsampled orthonormal transform `H P D` of a padded vector.
    pub fn full_forward(&self, z: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.len);
        let mut w = vec![T::zero(); self.len];
        for (i, &x) in z.iter().enumerate() {
            w[self.perm[i]] = self.signs[i] * x;
        }
        fwht_orthonormal(&mut w);
        w
    }

    /// Adjoint of [`Self::full_forward`].
    pub fn full_adjoint(&self, w: &[T]) -> Vec<T> {
        assert_eq!(w.len(), self.len);
        let mut t = w.to_vec();
        fwht_orthonormal(&mut t);
        (0..self.len).map(|i| self.signs[i] * t[self.perm[i]]).collect()
    }

    pub fn signal_dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn measurements(&self) -> usize {
        self.samples.len()
    }

    pub fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>> {
        LinearOperator::check_signal(self, x)?;
        let mut z = x.as_slice().to_vec();
        z.resize(self.len, T::zero());
        let w = self.full_forward(&z);
        Ok(self.samples.iter().map(|&s| w[s]).collect())
    }

    pub fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>> {
        LinearOperator::check_measurements(self, v)?;
        let mut w = vec![T::zero(); self.len];
        for (&s, &val) in self.samples.iter().zip(v) {
            w[s] = val;
        }
        let mut z = self.full_adjoint(&w);
        z.truncate(self.m * self.n);
        DenseMatrix::from_vec(self.m, self.n, z)
    }
}

impl<T: Scalar> LinearOperator<T> for StructuredOperator<T> {
    fn signal_dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn measurements(&self) -> usize {
        self.samples.len()
    }

    fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>> {
        StructuredOperator::apply(self, x)
    }

    fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>> {
        StructuredOperator::adjoint(self, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_transform_rows_are_orthonormal_on_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let op = StructuredOperator::<f64>::random(8, 8, 20, &mut rng).unwrap();
        let len = op.transform_len();
        // columns of the materialized full transform
        let cols: Vec<Vec<f64>> = (0..len)
            .map(|j| {
                let mut e = vec![0.0; len];
                e[j] = 1.0;
                op.full_forward(&e)
            })
            .collect();
        for a in 0..len {
            for b in 0..len {
                // (A Aᵀ)_{ab} = sum_j A_{aj} A_{bj}
                let g: f64 = (0..len).map(|j| cols[j][a] * cols[j][b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_then_adjoint_of_full_transform_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = StructuredOperator::<f64>::random(4, 8, 10, &mut rng).unwrap();
        let z: Vec<f64> = (0..32).map(|i| (i as f64).cos()).collect();
        let back = op.full_adjoint(&op.full_forward(&z));
        for (a, b) in z.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn non_power_of_two_signals_are_padded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = StructuredOperator::<f64>::random(3, 5, 9, &mut rng).unwrap();
        assert_eq!(op.transform_len(), 16);
        let x = DenseMatrix::from_fn(3, 5, |i, j| (i + j) as f64);
        assert_eq!(op.apply(&x).unwrap().len(), 9);
        assert_eq!(op.adjoint(&[1.0; 9]).unwrap().shape(), (3, 5));
    }
}
