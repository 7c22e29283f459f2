//! Total unimodularity: brute-force certification in exact arithmetic,
//! closure constructions, and generators for network-flow and assignment
//! programs whose constraint matrices are totally unimodular.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{binomial, MAX_ENUMERATION};
use crate::dense::inverse_norm;
use crate::error::{Error, Result};
use crate::exact::{inverse, q_int, q_to_f64, IntMatrix, Rational};
use crate::lp_model::StandardFormLP;
use crate::sparse::SparseMatrix;

/// Brute force applies only when `min(rows, cols)` is at most this.
pub const TU_MAX_MIN_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Exact determinant, in decimal.
    pub det: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuCertificate {
    pub verdict: bool,
    pub witness: Option<TuWitness>,
    pub submatrices_checked: u64,
}

/// Checks every square submatrix, smallest first and then in lexicographic
/// row/column order, stopping at the first determinant outside {-1, 0, 1}.
pub fn is_totally_unimodular(a: &SparseMatrix) -> Result<TuCertificate> {
    let rows = a.to_int_rows()?;
    let (p, n) = (a.n_rows(), a.n_cols());
    if p.min(n) > TU_MAX_MIN_DIM {
        return Err(Error::GuardExceeded(format!(
            "TU brute force needs min(m1, m2) <= {TU_MAX_MIN_DIM}, got {p} x {n}"
        )));
    }
    let total = binomial(p + n, n) - 1;
    if total > 50 * MAX_ENUMERATION {
        return Err(Error::GuardExceeded(format!("TU brute force over {total} submatrices")));
    }
    let exact = IntMatrix::from_i64(&rows);
    let one = BigInt::one();
    let mut checked = 0u64;
    for k in 1..=p.min(n) {
        for rs in (0..p).combinations(k) {
            for cs in (0..n).combinations(k) {
                checked += 1;
                let det = exact.submatrix_det(&rs, &cs);
                if det.abs() > one {
                    return Ok(TuCertificate {
                        verdict: false,
                        witness: Some(TuWitness {
                            rows: rs,
                            cols: cs,
                            det: det.to_string(),
                        }),
                        submatrices_checked: checked,
                    });
                }
            }
        }
    }
    Ok(TuCertificate {
        verdict: true,
        witness: None,
        submatrices_checked: checked,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureVariant {
    /// `[A e_i]` for a 0-based row index `i`.
    AppendUnitColumn(usize),
    Transpose,
    /// `blockdiag(A, A^T)`.
    BlockDiagonal,
}

pub fn tu_closure_build(a: &SparseMatrix, variant: ClosureVariant) -> Result<SparseMatrix> {
    if !a.is_exact_integer() {
        return Err(Error::NotInteger);
    }
    match variant {
        ClosureVariant::AppendUnitColumn(i) => {
            if i >= a.n_rows() {
                return Err(Error::Dimension(format!("row {i} out of range for {} rows", a.n_rows())));
            }
            let mut trip: Vec<_> = a.triplets().collect();
            trip.push((i, a.n_cols(), 1.0));
            SparseMatrix::from_triplets(a.n_rows(), a.n_cols() + 1, &trip)
        }
        ClosureVariant::Transpose => Ok(a.transpose()),
        ClosureVariant::BlockDiagonal => {
            let (p, n) = (a.n_rows(), a.n_cols());
            let mut trip: Vec<_> = a.triplets().collect();
            trip.extend(a.triplets().map(|(i, j, v)| (p + j, n + i, v)));
            SparseMatrix::from_triplets(p + n, n + p, &trip)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuInverseReport {
    pub size: usize,
    pub max_abs_entry: f64,
    pub inverse_norm: f64,
    pub inverse: Vec<Vec<i64>>,
}

/// Exact inverse of a square nonsingular TU matrix; its entries must lie in
/// {-1, 0, 1} and its spectral norm must not exceed the dimension.
pub fn tu_inverse_check(a: &SparseMatrix) -> Result<TuInverseReport> {
    let rows = a.to_int_rows()?;
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::Dimension(format!("matrix is {} x {}, not square", n, a.n_cols())));
    }
    let q: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| q_int(v)).collect()).collect();
    let inv = inverse(&q).ok_or(Error::Singular)?;
    let mut int_inv = vec![vec![0i64; n]; n];
    let mut max_abs = 0.0f64;
    for (i, row) in inv.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_integer() || v.abs() > Rational::one() {
                return Err(Error::BoundViolated(format!("inverse entry ({i}, {j}) = {v} outside {{-1, 0, 1}}")));
            }
            int_inv[i][j] = if v.is_zero() { 0 } else if v.is_positive() { 1 } else { -1 };
            max_abs = max_abs.max(q_to_f64(v).abs());
        }
    }
    let dense = a.to_dense();
    let inv_norm = if n == 0 { 0.0 } else { inverse_norm(&dense) };
    if inv_norm > n as f64 * (1.0 + 1e-12) {
        return Err(Error::BoundViolated(format!("||A^-1||_2 = {inv_norm} exceeds {n}")));
    }
    Ok(TuInverseReport {
        size: n,
        max_abs_entry: max_abs,
        inverse_norm: inv_norm,
        inverse: int_inv,
    })
}

/// Directed graph with integer supplies and arc costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowInstanceSpec {
    pub nodes: usize,
    /// `(tail, head)` pairs, 0-based.
    pub arcs: Vec<(usize, usize)>,
    /// Net supply per node (sums to zero).
    pub supplies: Vec<i64>,
    pub costs: Vec<i64>,
    pub drop_last_row: bool,
}

impl FlowInstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.supplies.len() != self.nodes || self.costs.len() != self.arcs.len() {
            return Err(Error::Dimension(format!(
                "{} nodes / {} arcs but {} supplies / {} costs",
                self.nodes,
                self.arcs.len(),
                self.supplies.len(),
                self.costs.len()
            )));
        }
        for &(t, h) in &self.arcs {
            if t >= self.nodes || h >= self.nodes {
                return Err(Error::InvalidParameter(format!("arc ({t}, {h}) references a missing node")));
            }
            if t == h {
                return Err(Error::InvalidParameter(format!("self-loop at node {t}")));
            }
        }
        let total: i64 = self.supplies.iter().sum();
        if total != 0 {
            return Err(Error::InvalidParameter(format!("supplies sum to {total}, expected 0")));
        }
        Ok(())
    }

    /// Random feasible instance: distinct arcs without self-loops, supplies
    /// induced by a random integral flow, costs uniform in `0..=max_cost`.
    pub fn random(nodes: usize, n_arcs: usize, max_cost: i64, seed: u64) -> Result<Self> {
        if nodes < 2 || n_arcs > nodes * (nodes - 1) {
            return Err(Error::InvalidParameter(format!("cannot place {n_arcs} distinct arcs on {nodes} nodes")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(n_arcs);
        while arcs.len() < n_arcs {
            let t = rng.gen_range(0..nodes);
            let h = rng.gen_range(0..nodes);
            if t != h && !arcs.contains(&(t, h)) {
                arcs.push((t, h));
            }
        }
        let mut supplies = vec![0i64; nodes];
        for &(t, h) in &arcs {
            let f = rng.gen_range(0..=2i64);
            supplies[t] += f;
            supplies[h] -= f;
        }
        let costs = (0..n_arcs).map(|_| rng.gen_range(0..=max_cost.max(0))).collect();
        Ok(FlowInstanceSpec {
            nodes,
            arcs,
            supplies,
            costs,
            drop_last_row: true,
        })
    }
}

/// Node-arc incidence matrix: `+1` at the tail, `-1` at the head.
pub fn incidence_matrix(nodes: usize, arcs: &[(usize, usize)]) -> Result<SparseMatrix> {
    let mut trip = Vec::with_capacity(2 * arcs.len());
    for (k, &(t, h)) in arcs.iter().enumerate() {
        trip.push((t, k, 1.0));
        trip.push((h, k, -1.0));
    }
    SparseMatrix::from_triplets(nodes, arcs.len(), &trip)
}

pub fn gen_min_cost_flow(spec: &FlowInstanceSpec) -> Result<StandardFormLP> {
    spec.validate()?;
    let mut a = incidence_matrix(spec.nodes, &spec.arcs)?;
    let mut b: Vec<f64> = spec.supplies.iter().map(|&s| s as f64).collect();
    if spec.drop_last_row {
        a = a.without_rows(&[spec.nodes - 1]);
        b.pop();
    }
    let c = spec.costs.iter().map(|&v| v as f64).collect();
    StandardFormLP::new(a, b, c)
}

/// Assignment polytope for an `n x n` cost matrix; variable `x_{ij}` sits at
/// column `i n + j`. Row sums come first, then column sums; the last column
/// sum is dropped as redundant (except for `n = 1`, which has one row).
pub fn gen_assignment(costs: &[Vec<i64>]) -> Result<StandardFormLP> {
    let n = costs.len();
    if n == 0 || costs.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("assignment costs must be a nonempty square matrix".into()));
    }
    let mut trip = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            trip.push((i, i * n + j, 1.0));
            if n > 1 && j < n - 1 {
                trip.push((n + j, i * n + j, 1.0));
            }
        }
    }
    let m1 = if n == 1 { 1 } else { 2 * n - 1 };
    let a = SparseMatrix::from_triplets(m1, n * n, &trip)?;
    let c = costs.iter().flatten().map(|&v| v as f64).collect();
    StandardFormLP::new(a, vec![1.0; m1], c)
}

pub fn random_assignment_costs(n: usize, max_cost: i64, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..=max_cost.max(0))).collect()).collect()
}
