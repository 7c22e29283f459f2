//! Exact LP oracle by basis enumeration, and distance to the optimal set.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::projection::{Polyhedron, PolyhedronProjector};
use crate::error::{Error, Result};
use crate::exact::{dot, inverse, q_from_f64, q_to_f64, q_vec_to_f64, rank, Rational};
use crate::lp_model::{PrimalDualPoint, StandardFormLP};
use crate::pdhg::DistanceOracle;

const MAX_ROWS: usize = 10;
const MAX_COLS: usize = 20;

/// Optimal value and a representative primal-dual vertex pair, in exact
/// rationals, together with the rational problem data that describes the
/// optimal faces `X* = {Ax = b, x >= 0, c.x = v*}` and
/// `Y* = {A^T y <= c, b.y = v*}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalFace {
    pub value: Rational,
    pub x_star: Vec<Rational>,
    pub y_star: Vec<Rational>,
    /// Columns of the optimal basis.
    pub basis: Vec<usize>,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalFaceSummary {
    pub value: f64,
    pub value_exact: String,
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub basis: Vec<usize>,
}

impl OptimalFace {
    pub fn value_f64(&self) -> f64 {
        q_to_f64(&self.value)
    }

    pub fn representative(&self) -> PrimalDualPoint {
        PrimalDualPoint::new(q_vec_to_f64(&self.x_star), q_vec_to_f64(&self.y_star))
    }

    pub fn summary(&self) -> OptimalFaceSummary {
        OptimalFaceSummary {
            value: self.value_f64(),
            value_exact: self.value.to_string(),
            x_star: q_vec_to_f64(&self.x_star),
            y_star: q_vec_to_f64(&self.y_star),
            basis: self.basis.clone(),
        }
    }

    pub fn primal_face(&self) -> Polyhedron {
        let m2 = self.c.len();
        let ineq = (0..m2)
            .map(|i| {
                let mut row = vec![Rational::zero(); m2];
                row[i] = -Rational::from_integer(1.into());
                row
            })
            .collect();
        let mut eq = self.a.clone();
        eq.push(self.c.clone());
        let mut eq_rhs = self.b.clone();
        eq_rhs.push(self.value.clone());
        Polyhedron {
            dim: m2,
            ineq,
            ineq_rhs: vec![Rational::zero(); m2],
            eq,
            eq_rhs,
        }
    }

    pub fn dual_face(&self) -> Polyhedron {
        let m1 = self.b.len();
        let m2 = self.c.len();
        let ineq = (0..m2).map(|j| (0..m1).map(|i| self.a[i][j].clone()).collect()).collect();
        Polyhedron {
            dim: m1,
            ineq,
            ineq_rhs: self.c.clone(),
            eq: vec![self.b.clone()],
            eq_rhs: vec![self.value.clone()],
        }
    }

    /// Exact membership of the representative pair in `X* x Y*`.
    pub fn representative_is_optimal(&self) -> bool {
        self.primal_face().contains_exact(&self.x_star) && self.dual_face().contains_exact(&self.y_star)
    }
}

fn rational_data(lp: &StandardFormLP) -> Result<(Vec<Vec<Rational>>, Vec<Rational>, Vec<Rational>)> {
    let conv = |v: f64| q_from_f64(v).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {v}")));
    let mut a = vec![vec![Rational::zero(); lp.m2()]; lp.m1()];
    for (i, j, v) in lp.a().triplets() {
        a[i][j] = conv(v)?;
    }
    let b = lp.b().iter().map(|&v| conv(v)).collect::<Result<_>>()?;
    let c = lp.c().iter().map(|&v| conv(v)).collect::<Result<_>>()?;
    Ok((a, b, c))
}

/// Solves a desk-scale LP exactly by enumerating bases.
///
/// Redundant equality rows are removed first; the optimal value is the
/// smallest objective over basic feasible solutions, and the reported
/// basis is the first optimal one whose dual solution `y = A_B^{-T} c_B` is
/// feasible. No such basis means the program is unbounded.
pub fn solve_exact(lp: &StandardFormLP) -> Result<OptimalFace> {
    if lp.m1() > MAX_ROWS || lp.m2() > MAX_COLS {
        return Err(Error::GuardExceeded(format!(
            "exact solve limited to m1 <= {MAX_ROWS}, m2 <= {MAX_COLS} (got {} x {})",
            lp.m1(),
            lp.m2()
        )));
    }
    let (a, b, c) = rational_data(lp)?;
    let m2 = lp.m2();

    let mut keep: Vec<usize> = Vec::new();
    for i in 0..a.len() {
        let mut trial: Vec<Vec<Rational>> = keep.iter().map(|&k| a[k].clone()).collect();
        trial.push(a[i].clone());
        if rank(&trial) == trial.len() {
            keep.push(i);
        }
    }
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(&b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    if rank(&augmented) > keep.len() {
        return Err(Error::Infeasible);
    }
    let r = keep.len();
    let a_red: Vec<&Vec<Rational>> = keep.iter().map(|&i| &a[i]).collect();
    let b_red: Vec<Rational> = keep.iter().map(|&i| b[i].clone()).collect();

    struct Candidate {
        cols: Vec<usize>,
        x_b: Vec<Rational>,
        inv: Vec<Vec<Rational>>,
        objective: Rational,
    }
    let mut feasible: Vec<Candidate> = Vec::new();
    for cols in (0..m2).combinations(r) {
        let basis: Vec<Vec<Rational>> = a_red.iter().map(|row| cols.iter().map(|&j| row[j].clone()).collect()).collect();
        let Some(inv) = inverse(&basis) else { continue };
        let x_b: Vec<Rational> = inv.iter().map(|row| dot(row, &b_red)).collect();
        if x_b.iter().any(|v| v.is_negative()) {
            continue;
        }
        let c_b: Vec<Rational> = cols.iter().map(|&j| c[j].clone()).collect();
        let objective = dot(&c_b, &x_b);
        feasible.push(Candidate { cols, x_b, inv, objective });
    }
    let Some(best) = feasible.iter().map(|f| &f.objective).min().cloned() else {
        return Err(Error::Infeasible);
    };

    for cand in feasible.iter().filter(|f| f.objective == best) {
        let c_b: Vec<Rational> = cand.cols.iter().map(|&j| c[j].clone()).collect();
        // y_red = B^{-T} c_B
        let y_red: Vec<Rational> = (0..r)
            .map(|i| (0..r).fold(Rational::zero(), |acc, k| acc + &cand.inv[k][i] * &c_b[k]))
            .collect();
        let dual_feasible = (0..m2).all(|j| {
            let aty = (0..r).fold(Rational::zero(), |acc, i| acc + &a_red[i][j] * &y_red[i]);
            aty <= c[j]
        });
        if !dual_feasible {
            continue;
        }
        let mut x_star = vec![Rational::zero(); m2];
        for (k, &j) in cand.cols.iter().enumerate() {
            x_star[j] = cand.x_b[k].clone();
        }
        let mut y_star = vec![Rational::zero(); lp.m1()];
        for (k, &i) in keep.iter().enumerate() {
            y_star[i] = y_red[k].clone();
        }
        return Ok(OptimalFace {
            value: best,
            x_star,
            y_star,
            basis: cand.cols.clone(),
            a,
            b,
            c,
        });
    }
    Err(Error::Unbounded)
}

/// Projector onto `Z* = X* x Y*`, built once per problem.
#[derive(Debug, Clone)]
pub struct OptimalSetProjector {
    primal: PolyhedronProjector,
    dual: PolyhedronProjector,
}

impl OptimalSetProjector {
    pub fn new(face: &OptimalFace) -> Result<Self> {
        let primal = PolyhedronProjector::new(&face.primal_face())?;
        let dual = PolyhedronProjector::new(&face.dual_face())?;
        if primal.is_empty() || dual.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(OptimalSetProjector { primal, dual })
    }

    /// Nearest point of `Z*` to `z`.
    pub fn project(&self, z: &PrimalDualPoint) -> PrimalDualPoint {
        let px = self.primal.project(&z.x).expect("nonempty primal face");
        let py = self.dual.project(&z.y).expect("nonempty dual face");
        PrimalDualPoint::new(px.point, py.point)
    }
}

impl DistanceOracle for OptimalSetProjector {
    fn distance(&self, z: &PrimalDualPoint) -> f64 {
        let dx = self.primal.distance(&z.x).unwrap_or(f64::NAN);
        let dy = self.dual.distance(&z.y).unwrap_or(f64::NAN);
        (dx * dx + dy * dy).sqrt()
    }
}

/// `dist(z, Z*)`; builds a fresh projector, so prefer
/// [`OptimalSetProjector`] for repeated queries.
pub fn distance_to_optimal(lp: &StandardFormLP, face: &OptimalFace, z: &PrimalDualPoint) -> Result<f64> {
    lp.check_point(z)?;
    let proj = OptimalSetProjector::new(face)?;
    Ok(proj.distance(z))
}
