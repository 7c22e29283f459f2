//! Exhaustive enumeration of square nonsingular submatrices.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dense::{inverse_norm, submatrix};
use crate::error::{Error, Result};
use crate::exact::IntMatrix;

/// Upper limit on the number of square submatrices an enumeration may visit.
pub const MAX_ENUMERATION: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmatrixWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// `||G^{-1}||_2` of the witness submatrix.
    pub inverse_norm: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of square submatrices of a `p x n` matrix: `C(p + n, n) - 1`.
pub fn enumeration_count(p: usize, n: usize) -> u128 {
    binomial(p + n, n) - 1
}

pub(crate) fn check_guard(p: usize, n: usize, what: &str) -> Result<()> {
    let count = enumeration_count(p, n);
    if count > MAX_ENUMERATION {
        return Err(Error::GuardExceeded(format!(
            "{what}: {p}x{n} matrix has {count} square submatrices (limit {MAX_ENUMERATION})"
        )));
    }
    Ok(())
}

pub(crate) struct EnumerationStats {
    pub checked: u64,
    pub nonsingular: u64,
}

/// Visits every square submatrix that is nonsingular in exact arithmetic,
/// in order of size, then lexicographic row set, then column set. `exact`
/// and `float` describe the same matrix (up to nonzero row scaling).
pub(crate) fn for_each_nonsingular(
    exact: &IntMatrix,
    float: &DMatrix<f64>,
    mut visit: impl FnMut(&[usize], &[usize], f64),
) -> EnumerationStats {
    let (p, n) = (exact.n_rows(), exact.n_cols());
    let mut stats = EnumerationStats {
        checked: 0,
        nonsingular: 0,
    };
    for k in 1..=p.min(n) {
        for rows in (0..p).combinations(k) {
            for cols in (0..n).combinations(k) {
                stats.checked += 1;
                if exact.submatrix_det(&rows, &cols).is_zero() {
                    continue;
                }
                stats.nonsingular += 1;
                let g = submatrix(float, &rows, &cols);
                visit(&rows, &cols, inverse_norm(&g));
            }
        }
    }
    stats
}
