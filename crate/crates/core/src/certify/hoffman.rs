//! Hoffman error bound for `P = {u : u_i >= 0 (i in S), D u <= d, F u = f}`.
//!
//! The constant is `alpha = 1 / max ||G^{-1}||_2` over square nonsingular
//! submatrices `G` of the stacked matrix `[D; F]`; sign constraints do not
//! enter the enumeration.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::enumerate::{check_guard, for_each_nonsingular, SubmatrixWitness};
use super::projection::{Polyhedron, PolyhedronProjector};
use crate::dense::{dot, from_rational_rows};
use crate::error::{Error, Result};
use crate::exact::{q_to_f64, q_vec_to_f64, IntMatrix, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct HoffmanSystem {
    pub dim: usize,
    pub d: Vec<Vec<Rational>>,
    pub d_rhs: Vec<Rational>,
    pub f: Vec<Vec<Rational>>,
    pub f_rhs: Vec<Rational>,
    /// Indices constrained to be nonnegative.
    pub sign_set: Vec<usize>,
}

impl HoffmanSystem {
    pub fn validate(&self) -> Result<()> {
        let bad_row = self.d.iter().chain(&self.f).any(|r| r.len() != self.dim);
        if bad_row || self.d.len() != self.d_rhs.len() || self.f.len() != self.f_rhs.len() {
            return Err(Error::Dimension("Hoffman system rows and right-hand sides disagree".into()));
        }
        if let Some(&i) = self.sign_set.iter().find(|&&i| i >= self.dim) {
            return Err(Error::Dimension(format!("sign index {i} out of range")));
        }
        Ok(())
    }

    /// Rows of `[D; F]`.
    pub fn stacked(&self) -> Vec<Vec<Rational>> {
        self.d.iter().chain(&self.f).cloned().collect()
    }

    pub fn polyhedron(&self) -> Polyhedron {
        let mut ineq = self.d.clone();
        let mut ineq_rhs = self.d_rhs.clone();
        for &i in &self.sign_set {
            let mut row = vec![Rational::zero(); self.dim];
            row[i] = -Rational::from_integer(1.into());
            ineq.push(row);
            ineq_rhs.push(Rational::zero());
        }
        Polyhedron {
            dim: self.dim,
            ineq,
            ineq_rhs,
            eq: self.f.clone(),
            eq_rhs: self.f_rhs.clone(),
        }
    }

    /// `||((D u - d)^+; F u - f)||_2`.
    pub fn residual(&self, u: &[f64]) -> f64 {
        let ineq: f64 = self
            .d
            .iter()
            .zip(&self.d_rhs)
            .map(|(row, h)| (dot(&q_vec_to_f64(row), u) - q_to_f64(h)).max(0.0).powi(2))
            .sum();
        let eq: f64 = self
            .f
            .iter()
            .zip(&self.f_rhs)
            .map(|(row, e)| (dot(&q_vec_to_f64(row), u) - q_to_f64(e)).powi(2))
            .sum();
        (ineq + eq).sqrt()
    }

    pub fn in_sign_set(&self, u: &[f64]) -> bool {
        self.sign_set.iter().all(|&i| u[i] >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoffmanConstant {
    pub alpha: f64,
    pub witness: SubmatrixWitness,
    pub submatrices_checked: u64,
    pub nonsingular: u64,
}

/// Hoffman constant of a stacked matrix (shared with the sharpness report).
pub(crate) fn alpha_of_stack(stack: &[Vec<Rational>], what: &str) -> Result<HoffmanConstant> {
    let p = stack.len();
    let n = stack.first().map_or(0, Vec::len);
    check_guard(p, n, what)?;
    let exact = IntMatrix::from_rational_rows(stack);
    let float = from_rational_rows(stack);
    let mut worst: Option<SubmatrixWitness> = None;
    let stats = for_each_nonsingular(&exact, &float, |rows, cols, inv_norm| {
        if worst.as_ref().is_none_or(|w| inv_norm > w.inverse_norm) {
            worst = Some(SubmatrixWitness {
                rows: rows.to_vec(),
                cols: cols.to_vec(),
                inverse_norm: inv_norm,
            });
        }
    });
    let witness = worst.ok_or(Error::NoNonsingularSubmatrix)?;
    Ok(HoffmanConstant {
        alpha: 1.0 / witness.inverse_norm,
        witness,
        submatrices_checked: stats.checked,
        nonsingular: stats.nonsingular,
    })
}

pub fn hoffman_alpha(system: &HoffmanSystem) -> Result<HoffmanConstant> {
    system.validate()?;
    alpha_of_stack(&system.stacked(), "Hoffman constant")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoffmanCheck {
    pub alpha: f64,
    /// Largest `alpha dist(u, P) / residual(u)` over the samples.
    pub worst_ratio: f64,
    pub violations: usize,
    pub samples: usize,
}

/// Evaluates `alpha dist(u, P) <= residual(u)` on the given samples `u in U`.
pub fn hoffman_inequality_check(system: &HoffmanSystem, samples: &[Vec<f64>]) -> Result<HoffmanCheck> {
    let constant = hoffman_alpha(system)?;
    let projector = PolyhedronProjector::new(&system.polyhedron())?;
    if projector.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut worst = 0.0f64;
    let mut violations = 0;
    for u in samples {
        if u.len() != system.dim {
            return Err(Error::Dimension(format!("sample has length {}, expected {}", u.len(), system.dim)));
        }
        if !system.in_sign_set(u) {
            return Err(Error::InvalidParameter("sample violates a sign constraint".into()));
        }
        let dist = projector.distance(u).ok_or(Error::EmptySet)?;
        let residual = system.residual(u);
        let lhs = constant.alpha * dist;
        let ratio = if residual > 0.0 {
            lhs / residual
        } else if lhs <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > 1.0 + 1e-9 {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    Ok(HoffmanCheck {
        alpha: constant.alpha,
        worst_ratio: worst,
        violations,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    fn qrows(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| q_int(v)).collect()).collect()
    }

    fn scalar_system() -> HoffmanSystem {
        HoffmanSystem {
            dim: 1,
            d: vec![],
            d_rhs: vec![],
            f: qrows(&[&[1]]),
            f_rhs: vec![q_int(1)],
            sign_set: vec![0],
        }
    }

    #[test]
    fn scalar_system_is_tight() {
        let sys = scalar_system();
        let c = hoffman_alpha(&sys).unwrap();
        assert_eq!(c.alpha, 1.0);
        let chk = hoffman_inequality_check(&sys, &[vec![3.0]]).unwrap();
        assert!((chk.worst_ratio - 1.0).abs() < 1e-12);
        let inside = hoffman_inequality_check(&sys, &[vec![1.0]]).unwrap();
        assert_eq!(inside.worst_ratio, 0.0);
    }

    #[test]
    fn identity_has_unit_constant() {
        let sys = HoffmanSystem {
            dim: 2,
            d: vec![],
            d_rhs: vec![],
            f: qrows(&[&[1, 0], &[0, 1]]),
            f_rhs: vec![q_int(0), q_int(0)],
            sign_set: vec![],
        };
        assert!((hoffman_alpha(&sys).unwrap().alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_no_constant() {
        let sys = HoffmanSystem {
            dim: 2,
            d: qrows(&[&[0, 0]]),
            d_rhs: vec![q_int(0)],
            f: vec![],
            f_rhs: vec![],
            sign_set: vec![],
        };
        assert_eq!(hoffman_alpha(&sys), Err(Error::NoNonsingularSubmatrix));
    }

    #[test]
    fn empty_polyhedron_rejected() {
        let mut sys = scalar_system();
        sys.f_rhs = vec![q_int(-1)];
        assert_eq!(hoffman_inequality_check(&sys, &[vec![0.0]]), Err(Error::EmptySet));
    }
}
