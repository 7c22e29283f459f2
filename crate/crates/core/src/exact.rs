//! Exact integer and rational linear algebra for certification paths.
//!
//! Determinants use fraction-free Bareiss elimination, first in `i128`
//! with checked arithmetic and then in `BigInt` when an intermediate
//! overflows. Rational elimination uses `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn q_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exact rational value of a finite `f64`.
pub fn q_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn q_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn q_vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(q_to_f64).collect()
}

/// Bareiss determinant in `i128`; `None` if an intermediate overflows.
pub fn det_i128(m: &[Vec<i128>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k])?;
                let rhs = a[i][k].checked_mul(a[k][j])?;
                a[i][j] = lhs.checked_sub(rhs)? / prev;
            }
        }
        prev = a[k][k];
    }
    a[n - 1][n - 1].checked_mul(sign)
}

/// Bareiss determinant over arbitrary-precision integers.
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Exact integer determinant of a dense `i64` matrix.
pub fn det_int(m: &[Vec<i64>]) -> BigInt {
    let small: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    match det_i128(&small) {
        Some(d) => BigInt::from(d),
        None => {
            let big: Vec<Vec<BigInt>> = m
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            det_bigint(&big)
        }
    }
}

/// Integer matrix used for repeated submatrix determinant queries.
///
/// Rational input rows are scaled by the LCM of their denominators, which
/// multiplies every determinant by a nonzero constant and so preserves
/// (non)singularity and the sign pattern needed by the callers.
#[derive(Debug, Clone)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i128>>>,
    n_cols: usize,
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let big = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::from_bigint(big)
    }

    pub fn from_bigint(rows: Vec<Vec<BigInt>>) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        // keep i128 entries small enough that a few products cannot overflow
        let limit = BigInt::from(1i64 << 40);
        let fits = rows.iter().flatten().all(|v| v.abs() <= limit);
        let small = fits.then(|| {
            rows.iter()
                .map(|r| r.iter().map(|v| v.to_i128().unwrap()).collect())
                .collect()
        });
        IntMatrix {
            rows,
            small,
            n_cols,
        }
    }

    /// Row-wise denominator clearing of a rational matrix.
    pub fn from_rational_rows(rows: &[Vec<Rational>]) -> Self {
        let big = rows
            .iter()
            .map(|r| {
                let lcm = r
                    .iter()
                    .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                r.iter()
                    .map(|q| q.numer() * (&lcm / q.denom()))
                    .collect()
            })
            .collect();
        Self::from_bigint(big)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn submatrix_det(&self, rows: &[usize], cols: &[usize]) -> BigInt {
        debug_assert_eq!(rows.len(), cols.len());
        if let Some(small) = &self.small {
            let sub: Vec<Vec<i128>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| small[i][j]).collect())
                .collect();
            if let Some(d) = det_i128(&sub) {
                return BigInt::from(d);
            }
        }
        let sub: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.rows[i][j].clone()).collect())
            .collect();
        det_bigint(&sub)
    }

    pub fn rank_of_rows(&self, rows: &[usize]) -> usize {
        let sub: Vec<Vec<Rational>> = rows
            .iter()
            .map(|&i| {
                self.rows[i]
                    .iter()
                    .map(|v| Rational::from_integer(v.clone()))
                    .collect()
            })
            .collect();
        rank(&sub)
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        for i in 0..n_rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..n_cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Exact inverse of a square rational matrix, `None` if singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solution set `{u : E u = e}` as a particular point plus a null-space basis.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub point: Vec<Rational>,
    pub null_basis: Vec<Vec<Rational>>,
}

/// Solves `E u = e` exactly; `None` when inconsistent. `dim` is the length
/// of `u` (needed when `E` has no rows).
pub fn solve_affine(eq: &[Vec<Rational>], rhs: &[Rational], dim: usize) -> Option<AffineSolution> {
    let mut aug: Vec<Vec<Rational>> = eq
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&dim) {
        return None;
    }
    let mut point = vec![Rational::zero(); dim];
    for (r, &c) in pivots.iter().enumerate() {
        point[c] = aug[r][dim].clone();
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let null_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); dim];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -aug[r][f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution { point, null_basis })
}

/// Exact product `M v`.
pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}
