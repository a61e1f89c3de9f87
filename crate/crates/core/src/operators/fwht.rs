use crate::scalar::Scalar;

/// In-place orthonormal fast Walsh–Hadamard transform.
///
/// The transform is symmetric and its own inverse. Panics unless the length
/// is a power of two.
pub fn fwht_orthonormal<T: Scalar>(data: &mut [T]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fwht length must be a power of two");
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = T::of(n as f64).sqrt().recip();
    data.iter_mut().for_each(|x| *x *= scale);
}
