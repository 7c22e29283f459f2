//! Standard-form linear programs `min c^T x  s.t. Ax = b, x >= 0`, their
//! Lagrangian `L(x, y) = c^T x + b^T y - y^T A x` and optimality residuals.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{dot, norm};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone)]
pub struct StandardFormLP {
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    h: f64,
    norm_a: OnceLock<f64>,
}

impl StandardFormLP {
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let (m1, m2) = (a.n_rows(), a.n_cols());
        if b.len() != m1 {
            return Err(Error::Dimension(format!("b has length {}, A has {m1} rows", b.len())));
        }
        if c.len() != m2 {
            return Err(Error::Dimension(format!("c has length {}, A has {m2} columns", c.len())));
        }
        if m1 == 0 {
            return Err(Error::Dimension("A has no rows".into()));
        }
        if m2 < m1 {
            return Err(Error::Dimension(format!("need m2 >= m1, got m1 = {m1}, m2 = {m2}")));
        }
        if b.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("b and c must be finite".into()));
        }
        let h = b.iter().chain(&c).fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(StandardFormLP {
            a,
            b,
            c,
            h,
            norm_a: OnceLock::new(),
        })
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Number of equality constraints.
    pub fn m1(&self) -> usize {
        self.a.n_rows()
    }

    /// Number of primal variables.
    pub fn m2(&self) -> usize {
        self.a.n_cols()
    }

    /// `H = max(|b_i|, |c_j|)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// True when `A`, `b` and `c` are all integer valued.
    pub fn is_integral(&self) -> bool {
        self.a.is_exact_integer() && self.b.iter().chain(&self.c).all(|v| v.fract() == 0.0)
    }

    /// Power-iteration estimate of `||A||_2` with default settings, cached.
    pub fn norm_a(&self) -> f64 {
        *self.norm_a.get_or_init(|| {
            spectral_norm_estimate(&self.a, DEFAULT_POWER_TOL, default_power_iters(&self.a), 0).sigma
        })
    }

    pub fn check_point(&self, z: &PrimalDualPoint) -> Result<()> {
        if z.x.len() != self.m2() || z.y.len() != self.m1() {
            return Err(Error::Dimension(format!(
                "point has (|x|, |y|) = ({}, {}), problem has (m2, m1) = ({}, {})",
                z.x.len(),
                z.y.len(),
                self.m2(),
                self.m1()
            )));
        }
        Ok(())
    }
}

/// A primal-dual pair `z = (x, y)` with `x` of length m2 and `y` of length m1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        PrimalDualPoint { x, y }
    }

    pub fn zeros(lp: &StandardFormLP) -> Self {
        PrimalDualPoint {
            x: vec![0.0; lp.m2()],
            y: vec![0.0; lp.m1()],
        }
    }

    /// Concatenation `(x, y)`.
    pub fn stacked(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn from_stacked(v: &[f64], m2: usize) -> Self {
        PrimalDualPoint {
            x: v[..m2].to_vec(),
            y: v[m2..].to_vec(),
        }
    }

    pub fn norm(&self) -> f64 {
        (dot(&self.x, &self.x) + dot(&self.y, &self.y)).sqrt()
    }

    pub fn distance(&self, other: &PrimalDualPoint) -> f64 {
        let dx: f64 = self.x.iter().zip(&other.x).map(|(a, b)| (a - b).powi(2)).sum();
        let dy: f64 = self.y.iter().zip(&other.y).map(|(a, b)| (a - b).powi(2)).sum();
        (dx + dy).sqrt()
    }

    /// Membership in `Z = {x >= 0} x R^m1`.
    pub fn in_domain(&self) -> Result<()> {
        match self.x.iter().position(|&v| !(v >= 0.0)) {
            Some(index) => Err(Error::OutsideDomain {
                index,
                value: self.x[index],
            }),
            None => Ok(()),
        }
    }
}

/// Stacked optimality residual `((c.x - b.y)^+ / R, Ax - b, (A^T y - c)^+)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktResidual {
    pub scaled_gap: f64,
    pub primal_infeas: Vec<f64>,
    pub dual_infeas: Vec<f64>,
    pub norm: f64,
}

/// `L(x, y) = c.x + b.y - y.(Ax)`.
pub fn lagrangian(lp: &StandardFormLP, z: &PrimalDualPoint) -> Result<f64> {
    lp.check_point(z)?;
    let ax = lp.a().mul_vec(&z.x);
    Ok(dot(lp.c(), &z.x) + dot(lp.b(), &z.y) - dot(&z.y, &ax))
}

pub fn kkt_residual(lp: &StandardFormLP, z: &PrimalDualPoint, radius: f64) -> Result<KktResidual> {
    lp.check_point(z)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("R must be positive, got {radius}")));
    }
    let ax = lp.a().mul_vec(&z.x);
    let aty = lp.a().tmul_vec(&z.y);
    Ok(kkt_from_products(lp, z, &ax, &aty, radius))
}

/// KKT residual from precomputed `Ax` and `A^T y`.
pub(crate) fn kkt_from_products(
    lp: &StandardFormLP,
    z: &PrimalDualPoint,
    ax: &[f64],
    aty: &[f64],
    radius: f64,
) -> KktResidual {
    let gap = dot(lp.c(), &z.x) - dot(lp.b(), &z.y);
    let scaled_gap = gap.max(0.0) / radius;
    let primal_infeas: Vec<f64> = ax.iter().zip(lp.b()).map(|(a, b)| a - b).collect();
    let dual_infeas: Vec<f64> = aty.iter().zip(lp.c()).map(|(a, c)| (a - c).max(0.0)).collect();
    let norm = (scaled_gap * scaled_gap + dot(&primal_infeas, &primal_infeas) + dot(&dual_infeas, &dual_infeas))
        .sqrt();
    KktResidual {
        scaled_gap,
        primal_infeas,
        dual_infeas,
        norm,
    }
}

/// `sqrt(||x||^2 - 2 eta x.(A^T y) + ||y||^2)`, defined for `eta ||A||_2 < 1`.
pub fn weighted_norm(lp: &StandardFormLP, z: &PrimalDualPoint, eta: f64) -> Result<f64> {
    lp.check_point(z)?;
    if eta < 0.0 {
        return Err(Error::InvalidParameter(format!("eta must be nonnegative, got {eta}")));
    }
    let product = eta * lp.norm_a();
    if product >= 1.0 {
        return Err(Error::StepTooLarge { product });
    }
    let aty = lp.a().tmul_vec(&z.y);
    let form = dot(&z.x, &z.x) - 2.0 * eta * dot(&z.x, &aty) + dot(&z.y, &z.y);
    // the form is >= (1 - eta ||A||) ||z||^2; only rounding can push it below 0
    debug_assert!(form >= -1e-12 * (1.0 + z.norm().powi(2)));
    Ok(form.max(0.0).sqrt())
}

pub const DEFAULT_POWER_TOL: f64 = 1e-8;

pub fn default_power_iters(a: &SparseMatrix) -> usize {
    10 * (a.n_rows() + a.n_cols())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when `A` has no nonzero entries; `sigma` is then 0.
    pub zero_matrix: bool,
}

/// Power iteration on `v -> A^T (A v)`.
///
/// The estimate is the square root of the Rayleigh quotient, which never
/// exceeds `||A||_2` in exact arithmetic. Iteration stops once the relative
/// change of the quotient, inflated by the observed contraction rate, drops
/// below `rel_tol`.
pub fn spectral_norm_estimate(a: &SparseMatrix, rel_tol: f64, max_iters: usize, seed: u64) -> SpectralEstimate {
    if a.nnz() == 0 {
        return SpectralEstimate {
            sigma: 0.0,
            iterations: 0,
            converged: true,
            zero_matrix: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.n_cols()).map(|_| rng.gen::<f64>() - 0.5).collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut av = vec![0.0; a.n_rows()];
    let mut w = vec![0.0; a.n_cols()];
    let mut quotient = 0.0f64;
    let mut last_change = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        a.mul_vec_into(&v, &mut av);
        a.tmul_vec_into(&av, &mut w);
        let next = dot(&av, &av);
        let wn = norm(&w);
        if wn == 0.0 {
            // v landed in the null space; restart from a fresh direction
            v = (0..a.n_cols()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let n = norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            continue;
        }
        v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / wn);
        let change = (next - quotient).abs();
        let ratio = if last_change.is_finite() && last_change > 0.0 {
            (change / last_change).min(0.999)
        } else {
            0.0
        };
        let predicted = change * (ratio / (1.0 - ratio)).max(1.0);
        quotient = quotient.max(next);
        last_change = change;
        if iterations > 1 && predicted <= rel_tol * quotient {
            converged = true;
            break;
        }
    }
    SpectralEstimate {
        sigma: quotient.sqrt(),
        iterations,
        converged,
        zero_matrix: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn lp1() -> StandardFormLP {
        let a = SparseMatrix::from_dense_rows(&[vec![1.0, 1.0]]).unwrap();
        StandardFormLP::new(a, vec![1.0], vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn lagrangian_spot_values() {
        let lp = lp1();
        let z0 = PrimalDualPoint::new(vec![0.0, 0.0], vec![0.0]);
        assert_eq!(lagrangian(&lp, &z0).unwrap(), 0.0);
        let z = PrimalDualPoint::new(vec![1.0, 0.0], vec![1.0]);
        assert_eq!(lagrangian(&lp, &z).unwrap(), 1.0);
        let bad = PrimalDualPoint::new(vec![1.0], vec![1.0]);
        assert!(matches!(lagrangian(&lp, &bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn kkt_spot_values() {
        let lp = lp1();
        let zstar = PrimalDualPoint::new(vec![1.0, 0.0], vec![1.0]);
        for r in [0.5, 1.0, 16.0] {
            assert_eq!(kkt_residual(&lp, &zstar, r).unwrap().norm, 0.0);
        }
        let k = kkt_residual(&lp, &PrimalDualPoint::zeros(&lp), 1.0).unwrap();
        assert_eq!(k.primal_infeas, vec![-1.0]);
        assert_eq!(k.scaled_gap, 0.0);
        assert_eq!(k.dual_infeas, vec![0.0, 0.0]);
        assert_eq!(k.norm, 1.0);
        assert!(kkt_residual(&lp, &zstar, 0.0).is_err());
        assert!(kkt_residual(&lp, &zstar, -1.0).is_err());
    }

    #[test]
    fn weighted_norm_spot_values() {
        let lp = lp1();
        assert_eq!(weighted_norm(&lp, &PrimalDualPoint::zeros(&lp), 0.25).unwrap(), 0.0);
        let z = PrimalDualPoint::new(vec![1.0, 0.0], vec![1.0]);
        assert!((weighted_norm(&lp, &z, 0.25).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        let w = PrimalDualPoint::new(vec![3.0, -1.0], vec![2.0]);
        assert!((weighted_norm(&lp, &w, 0.0).unwrap() - w.norm()).abs() < 1e-15);
        // ||A|| = sqrt(2), so eta = 0.75 is too large
        assert!(matches!(weighted_norm(&lp, &z, 0.75), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn spectral_spot_values() {
        let id = SparseMatrix::identity(3);
        let est = spectral_norm_estimate(&id, 1e-8, 100, 0);
        assert!((est.sigma - 1.0).abs() < 1e-9);
        let one = SparseMatrix::from_dense_rows(&[vec![3.0]]).unwrap();
        assert!((spectral_norm_estimate(&one, 1e-8, 10, 0).sigma - 3.0).abs() < 1e-12);
        let zero = SparseMatrix::from_triplets(2, 2, &[]).unwrap();
        let z = spectral_norm_estimate(&zero, 1e-8, 10, 0);
        assert!(z.zero_matrix && z.sigma == 0.0);
    }

    #[test]
    fn rejects_wide_dual() {
        let a = SparseMatrix::from_dense_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(StandardFormLP::new(a, vec![1.0, 1.0], vec![1.0]).is_err());
    }
}
