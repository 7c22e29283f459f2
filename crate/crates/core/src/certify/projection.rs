//! Euclidean projection onto a rational polyhedron by active-set enumeration.
//!
//! For each subset `S` of inequality rows, the affine set where the rows of
//! `S` and all equalities hold is solved exactly. Projecting onto every such
//! set and keeping the feasible candidates recovers the true projection: the
//! projection's own active set (reduced to linearly independent rows) is
//! among the subsets, and every feasible candidate is at least as far away.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dense::{dot, norm, orthonormal_basis};
use crate::error::{Error, Result};
use crate::exact::{dot as qdot, q_to_f64, q_vec_to_f64, solve_affine, Rational};

/// Limit on inequality rows (the enumeration visits up to `2^k` subsets).
pub const MAX_PROJECTION_INEQUALITIES: usize = 16;

const FEAS_TOL: f64 = 1e-9;

/// `{u : G u <= h, E u = e}` with rational data.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub dim: usize,
    pub ineq: Vec<Vec<Rational>>,
    pub ineq_rhs: Vec<Rational>,
    pub eq: Vec<Vec<Rational>>,
    pub eq_rhs: Vec<Rational>,
}

impl Polyhedron {
    pub fn contains_exact(&self, u: &[Rational]) -> bool {
        let dotq = |row: &[Rational]| row.iter().zip(u).fold(Rational::default(), |acc, (a, b)| acc + a * b);
        self.ineq.iter().zip(&self.ineq_rhs).all(|(row, h)| dotq(row) <= *h)
            && self.eq.iter().zip(&self.eq_rhs).all(|(row, e)| dotq(row) == *e)
    }
}

#[derive(Debug, Clone)]
struct Piece {
    point: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

/// Intersects `{point + N t}` with `row . u = rhs`; `None` when the row is
/// constant on the set (dependent or inconsistent).
fn restrict(point: &[Rational], basis: &[Vec<Rational>], row: &[Rational], rhs: &Rational) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let w: Vec<Rational> = basis.iter().map(|v| qdot(row, v)).collect();
    let j = w.iter().position(|x| !x.is_zero())?;
    let t = (rhs - qdot(row, point)) / &w[j];
    let new_point = point.iter().zip(&basis[j]).map(|(p, b)| p + &t * b).collect();
    let new_basis = basis
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(k, v)| {
            let f = &w[k] / &w[j];
            if f.is_zero() {
                v.clone()
            } else {
                v.iter().zip(&basis[j]).map(|(a, b)| a - &f * b).collect()
            }
        })
        .collect();
    Some((new_point, new_basis))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub point: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct PolyhedronProjector {
    dim: usize,
    ineq: Vec<Vec<f64>>,
    ineq_rhs: Vec<f64>,
    pieces: Vec<Piece>,
}

impl PolyhedronProjector {
    pub fn new(poly: &Polyhedron) -> Result<Self> {
        let k = poly.ineq.len();
        if k > MAX_PROJECTION_INEQUALITIES {
            return Err(Error::GuardExceeded(format!(
                "projection with {k} inequalities (limit {MAX_PROJECTION_INEQUALITIES})"
            )));
        }
        let mut pieces = Vec::new();
        if let Some(sol) = solve_affine(&poly.eq, &poly.eq_rhs, poly.dim) {
            // depth-first over subsets in increasing index order; a subset
            // that is dependent or inconsistent prunes everything below it
            let mut stack = vec![(0usize, sol.point, sol.null_basis)];
            while let Some((next, point, basis)) = stack.pop() {
                let fbasis: Vec<Vec<f64>> = basis.iter().map(|v| q_vec_to_f64(v)).collect();
                pieces.push(Piece {
                    point: q_vec_to_f64(&point),
                    basis: orthonormal_basis(&fbasis),
                });
                for i in (next..k).rev() {
                    if let Some((p, b)) = restrict(&point, &basis, &poly.ineq[i], &poly.ineq_rhs[i]) {
                        stack.push((i + 1, p, b));
                    }
                }
            }
        }
        Ok(PolyhedronProjector {
            dim: poly.dim,
            ineq: poly.ineq.iter().map(|r| q_vec_to_f64(r)).collect(),
            ineq_rhs: poly.ineq_rhs.iter().map(q_to_f64).collect(),
            pieces,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn feasible(&self, p: &[f64]) -> bool {
        self.ineq.iter().zip(&self.ineq_rhs).all(|(row, &h)| {
            let scale = 1.0 + h.abs() + norm(row) * norm(p);
            dot(row, p) <= h + FEAS_TOL * scale
        })
    }

    /// Nearest point of the polyhedron; `None` when it is empty.
    pub fn project(&self, u: &[f64]) -> Option<Projection> {
        assert_eq!(u.len(), self.dim, "projection: point dimension");
        let mut best: Option<Projection> = None;
        for piece in &self.pieces {
            let diff: Vec<f64> = u.iter().zip(&piece.point).map(|(a, b)| a - b).collect();
            let mut p = piece.point.clone();
            for q in &piece.basis {
                let coef = dot(&diff, q);
                for (pi, qi) in p.iter_mut().zip(q) {
                    *pi += coef * qi;
                }
            }
            if !self.feasible(&p) {
                continue;
            }
            let d = u.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| d < b.distance) {
                best = Some(Projection { point: p, distance: d });
            }
        }
        best
    }

    pub fn distance(&self, u: &[f64]) -> Option<f64> {
        self.project(u).map(|p| p.distance)
    }

    pub fn is_empty(&self) -> bool {
        self.project(&vec![0.0; self.dim]).is_none()
    }
}
