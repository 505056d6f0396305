//! Dense row-major tensors contracted one axis at a time. Backs both the Bernstein
//! basis change and exact polynomial evaluation on tensor grids.

use std::ops::{AddAssign, Mul};

use num_traits::Zero;
use rayon::prelude::*;

/// Contracts `axis` of a row-major tensor with `matrix` (`rows × shape[axis]`):
/// `out[.., r, ..] = Σ_k data[.., k, ..] · matrix[r][k]`.
///
/// Returns the new data; the caller updates `shape[axis] = matrix.len()`.
pub(crate) fn contract_axis<T>(
    data: &[T],
    shape: &[usize],
    axis: usize,
    matrix: &[Vec<T>],
) -> Vec<T>
where
    T: Clone + Zero + AddAssign + Send + Sync,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let len = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let rows = matrix.len();
    debug_assert_eq!(data.len(), outer * len * inner);
    debug_assert!(matrix.iter().all(|row| row.len() == len));

    let blocks: Vec<Vec<T>> = (0..outer * rows)
        .into_par_iter()
        .map(|block| {
            let (o, r) = (block / rows, block % rows);
            let mut acc = vec![T::zero(); inner];
            for (k, m) in matrix[r].iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let base = (o * len + k) * inner;
                for (t, slot) in acc.iter_mut().enumerate() {
                    let d = &data[base + t];
                    if !d.is_zero() {
                        *slot += d * m;
                    }
                }
            }
            acc
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

/// Row-major flat offset of `index` in `shape`.
pub(crate) fn flat_index(index: &[usize], shape: &[usize]) -> usize {
    index.iter().zip(shape).fold(0, |acc, (&i, &s)| acc * s + i)
}

/// Inverse of [`flat_index`].
pub(crate) fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut index = vec![0; shape.len()];
    for (slot, &s) in index.iter_mut().zip(shape).rev() {
        *slot = flat % s;
        flat /= s;
    }
    index
}
