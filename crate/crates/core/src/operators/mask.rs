use std::collections::HashMap;

use rand::Rng;

use super::{LinearOperator, OperatorDescriptor};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Matrix-completion mask: observes the entries of `X` on a sorted set `Ω`.
#[derive(Clone, Debug)]
pub struct MaskOperator {
    m: usize,
    n: usize,
    /// Row-major linear indices, strictly increasing.
    indices: Vec<usize>,
    pub(super) descriptor: Option<OperatorDescriptor>,
}

impl MaskOperator {
    /// Builds a mask from `(row, col)` coordinates; duplicates are rejected.
    pub fn from_coords(m: usize, n: usize, coords: &[(usize, usize)]) -> Result<Self> {
        let mut indices = Vec::with_capacity(coords.len());
        for &(i, j) in coords {
            if i >= m || j >= n {
                return Err(Error::InvalidInput(format!(
                    "mask coordinate ({i}, {j}) outside {m}x{n}"
                )));
            }
            indices.push(i * n + j);
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate mask coordinate".into()));
        }
        Ok(Self {
            m,
            n,
            indices,
            descriptor: None,
        })
    }

    /// Uniformly random `Ω` of size `p`, drawn without replacement by a
    /// partial Fisher–Yates shuffle over the virtual index range `0..m n`.
    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, p: usize, rng: &mut R) -> Result<Self> {
        let total = m * n;
        if p == 0 || p > total {
            return Err(Error::InvalidInput(format!(
                "mask needs 1 <= p <= m*n = {total}, got {p}"
            )));
        }
        let mut indices = sample_without_replacement(total, p, rng);
        indices.sort_unstable();
        Ok(Self {
            m,
            n,
            indices,
            descriptor: None,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `(row, col)` of each observed entry, in measurement order.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.iter().map(move |&l| (l / self.n, l % self.n))
    }
}

pub(super) fn sample_without_replacement<R: Rng + ?Sized>(total: usize, p: usize, rng: &mut R) -> Vec<usize> {
    // swapped slots of the virtual array 0..total
    let mut swaps: HashMap<usize, usize> = HashMap::with_capacity(2 * p);
    let mut out = Vec::with_capacity(p);
    for i in 0..p {
        let j = rng.gen_range(i..total);
        let vj = *swaps.get(&j).unwrap_or(&j);
        let vi = *swaps.get(&i).unwrap_or(&i);
        swaps.insert(j, vi);
        out.push(vj);
    }
    out
}

impl<T: Scalar> LinearOperator<T> for MaskOperator {
    fn signal_dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn measurements(&self) -> usize {
        self.indices.len()
    }

    fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<T>> {
        self.check_signal(x)?;
        let data = x.as_slice();
        Ok(self.indices.iter().map(|&l| data[l]).collect())
    }

    fn adjoint(&self, v: &[T]) -> Result<DenseMatrix<T>> {
        self.check_measurements(v)?;
        let mut out = DenseMatrix::zeros(self.m, self.n);
        let data = out.as_mut_slice();
        for (&l, &val) in self.indices.iter().zip(v) {
            data[l] = val;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_entry_mask() {
        let op = MaskOperator::from_coords(2, 2, &[(0, 0)]).unwrap();
        let x = DenseMatrix::from_rows(&[vec![7.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(op.apply(&x).unwrap(), vec![7.0]);
    }

    #[test]
    fn adjoint_scatters_onto_omega() {
        let op = MaskOperator::from_coords(2, 3, &[(1, 2), (0, 1)]).unwrap();
        let z = LinearOperator::<f64>::adjoint(&op, &[5.0, -1.0]).unwrap();
        assert_eq!(z.as_slice(), &[0.0, 5.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn random_mask_has_distinct_sorted_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let op = MaskOperator::random(30, 40, 700, &mut rng).unwrap();
        assert_eq!(op.indices().len(), 700);
        assert!(op.indices().windows(2).all(|w| w[0] < w[1]));
        assert!(*op.indices().last().unwrap() < 1200);
    }

    #[test]
    fn rejects_duplicates_and_bad_sizes() {
        assert!(MaskOperator::from_coords(2, 2, &[(0, 0), (0, 0)]).is_err());
        assert!(MaskOperator::from_coords(2, 2, &[(2, 0)]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(MaskOperator::random(2, 2, 5, &mut rng).is_err());
        assert!(MaskOperator::random(2, 2, 0, &mut rng).is_err());
    }

    #[test]
    fn full_mask_sampling_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut s = sample_without_replacement(50, 50, &mut rng);
        s.sort_unstable();
        assert_eq!(s, (0..50).collect::<Vec<_>>());
    }
}
