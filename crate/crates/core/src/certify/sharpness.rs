//! Sharpness constant of the normalized duality gap on totally unimodular
//! programs, and the rank-one perturbation bound behind it.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::enumerate::{check_guard, for_each_nonsingular, SubmatrixWitness};
use crate::dense::{from_rational_rows, inverse_norm, norm};
use crate::error::{Error, Result};
use crate::exact::{det_int, q_from_f64, IntMatrix, Rational};
use crate::lp_model::StandardFormLP;
use crate::sparse::SparseMatrix;
use crate::tu::is_totally_unimodular;

/// `n + 1 + M ((n + 1)^1.5 ||v||_2 + n + 1)` for an `(n+1) x (n+1)` stack.
pub fn rank_one_bound(n: usize, m: f64, v_norm: f64) -> f64 {
    let n1 = (n + 1) as f64;
    n1 + m * (n1.powf(1.5) * v_norm + n1)
}

/// Explicit lower value for the sharpness constant: the reciprocal of the
/// rank-one bound with `n = 2 m1`, `M = R` and `||v||_2 <= 2 H sqrt(m1) / R`.
pub fn theoretical_alpha_lower(m1: usize, h: f64, radius: u64) -> f64 {
    let r = radius as f64;
    let v_norm = 2.0 * h * (m1 as f64).sqrt() / r;
    1.0 / rank_one_bound(2 * m1, r, v_norm)
}

/// The `(1 + m1 + m2) x (m2 + m1)` matrix
/// `[c^T/R  -b^T/R; A 0; 0 A^T]` in exact rationals.
pub fn sharpness_stack(lp: &StandardFormLP, radius: u64) -> Result<Vec<Vec<Rational>>> {
    let (m1, m2) = (lp.m1(), lp.m2());
    let conv = |v: f64| q_from_f64(v).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {v}")));
    let r = Rational::from_integer(BigInt::from(radius));
    let mut rows = Vec::with_capacity(1 + m1 + m2);
    let mut top = Vec::with_capacity(m1 + m2);
    for &cj in lp.c() {
        top.push(conv(cj)? / &r);
    }
    for &bi in lp.b() {
        top.push(-conv(bi)? / &r);
    }
    rows.push(top);
    let mut a = vec![vec![Rational::zero(); m2]; m1];
    for (i, j, v) in lp.a().triplets() {
        a[i][j] = conv(v)?;
    }
    for row in &a {
        let mut full = row.clone();
        full.extend(std::iter::repeat_n(Rational::zero(), m1));
        rows.push(full);
    }
    for j in 0..m2 {
        let mut full = vec![Rational::zero(); m2];
        full.extend((0..m1).map(|i| a[i][j].clone()));
        rows.push(full);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub radius: u64,
    /// `1 / max ||G^{-1}||_2` over nonsingular submatrices of the stack.
    pub alpha: f64,
    pub witness: SubmatrixWitness,
    pub theoretical_alpha_lower: f64,
    pub submatrices_checked: u64,
    pub nonsingular: u64,
    /// Nonsingular submatrices that contain the objective row.
    pub rank_one_checked: u64,
    pub rank_one_violations: u64,
    /// Largest `||G^{-1}|| / bound` among those submatrices.
    pub rank_one_max_ratio: f64,
}

pub fn sharpness_alpha(lp: &StandardFormLP, radius: u64) -> Result<SharpnessReport> {
    if radius == 0 {
        return Err(Error::InvalidParameter("R must be positive".into()));
    }
    let stack = sharpness_stack(lp, radius)?;
    let (p, n) = (stack.len(), lp.m1() + lp.m2());
    check_guard(p, n, "sharpness constant")?;
    let exact = IntMatrix::from_rational_rows(&stack);
    let float = from_rational_rows(&stack);
    let objective: Vec<f64> = (0..n).map(|j| float[(0, j)]).collect();
    let m = radius as f64;

    let mut worst: Option<SubmatrixWitness> = None;
    let mut rank_one_checked = 0;
    let mut rank_one_violations = 0;
    let mut rank_one_max_ratio = 0.0f64;
    let stats = for_each_nonsingular(&exact, &float, |rows, cols, inv_norm| {
        if worst.as_ref().is_none_or(|w| inv_norm > w.inverse_norm) {
            worst = Some(SubmatrixWitness {
                rows: rows.to_vec(),
                cols: cols.to_vec(),
                inverse_norm: inv_norm,
            });
        }
        if rows[0] == 0 {
            let v: Vec<f64> = cols.iter().map(|&j| objective[j]).collect();
            let bound = rank_one_bound(rows.len() - 1, m, norm(&v));
            rank_one_checked += 1;
            let ratio = inv_norm / bound;
            if ratio > 1.0 + 1e-12 {
                rank_one_violations += 1;
            }
            rank_one_max_ratio = rank_one_max_ratio.max(ratio);
        }
    });
    let witness = worst.ok_or(Error::NoNonsingularSubmatrix)?;
    Ok(SharpnessReport {
        radius,
        alpha: 1.0 / witness.inverse_norm,
        witness,
        theoretical_alpha_lower: theoretical_alpha_lower(lp.m1(), lp.h(), radius),
        submatrices_checked: stats.checked,
        nonsingular: stats.nonsingular,
        rank_one_checked,
        rank_one_violations,
        rank_one_max_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShermanMorrisonCheck {
    /// `||[v^T; V]^{-1}||_2`
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks the rank-one bound for `v = numerators / denominator` stacked on a
/// totally unimodular `V` with `n` rows and `n + 1` columns.
pub fn sherman_morrison_bound_check(numerators: &[i64], denominator: u64, v_mat: &[Vec<i64>]) -> Result<ShermanMorrisonCheck> {
    let n = v_mat.len();
    if denominator == 0 {
        return Err(Error::InvalidParameter("M must be a positive integer".into()));
    }
    if numerators.len() != n + 1 || v_mat.iter().any(|r| r.len() != n + 1) {
        return Err(Error::Dimension(format!("need v of length {} and V of shape {n} x {}", n + 1, n + 1)));
    }
    if n > 0 {
        let cert = is_totally_unimodular(&SparseMatrix::from_int_rows(v_mat)?)?;
        if !cert.verdict {
            let det = cert.witness.map(|w| w.det).unwrap_or_default();
            return Err(Error::NotTotallyUnimodular { det });
        }
    }
    let mut int_stack = vec![numerators.to_vec()];
    int_stack.extend(v_mat.iter().cloned());
    if det_int(&int_stack).is_zero() {
        return Err(Error::Singular);
    }
    let m = denominator as f64;
    let v: Vec<f64> = numerators.iter().map(|&k| k as f64 / m).collect();
    let g = nalgebra::DMatrix::from_fn(n + 1, n + 1, |i, j| if i == 0 { v[j] } else { v_mat[i - 1][j] as f64 });
    let measured = inverse_norm(&g);
    let bound = rank_one_bound(n, m, norm(&v));
    Ok(ShermanMorrisonCheck {
        measured,
        bound,
        holds: measured <= bound,
    })
}
