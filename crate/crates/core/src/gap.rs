//! Normalized duality gap `rho_r(z)` and its `r -> 0+` limit.
//!
//! For the bilinear Lagrangian the gap objective
//! `zhat -> L(x, yhat) - L(xhat, y)` is affine in `zhat` with gradient
//! `g = (A^T y - c, b - A x)` and value 0 at `zhat = z`, so `rho_r` is a
//! linear maximisation over the ball of radius `r` intersected with `Z`.
//! Its maximiser lies on the projected-gradient path
//! `xhat(l) = max(x + l g_x, 0)`, `yhat(l) = y + l g_y`.

use serde::{Deserialize, Serialize};

use crate::dense::{dot, norm};
use crate::error::{Error, Result};
use crate::lp_model::{PrimalDualPoint, StandardFormLP};

/// Relative threshold below which gap values are treated as zero.
pub const GAP_FLUSH: f64 = 1e-14;

const MAX_BISECTIONS: usize = 100;
const BISECTION_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapGradient {
    /// `A^T y - c`
    pub g_x: Vec<f64>,
    /// `b - A x`
    pub g_y: Vec<f64>,
}

impl GapGradient {
    /// Value of the affine gap objective at `zhat`: `g . (zhat - z)`.
    pub fn gap_at(&self, z: &PrimalDualPoint, zhat: &PrimalDualPoint) -> f64 {
        let gx: f64 = self.g_x.iter().zip(zhat.x.iter().zip(&z.x)).map(|(g, (a, b))| g * (a - b)).sum();
        let gy: f64 = self.g_y.iter().zip(zhat.y.iter().zip(&z.y)).map(|(g, (a, b))| g * (a - b)).sum();
        gx + gy
    }
}

pub fn gap_gradient(lp: &StandardFormLP, z: &PrimalDualPoint) -> Result<GapGradient> {
    lp.check_point(z)?;
    let aty = lp.a().tmul_vec(&z.y);
    let ax = lp.a().mul_vec(&z.x);
    Ok(gradient_from_products(lp, &ax, &aty))
}

pub(crate) fn gradient_from_products(lp: &StandardFormLP, ax: &[f64], aty: &[f64]) -> GapGradient {
    GapGradient {
        g_x: aty.iter().zip(lp.c()).map(|(a, c)| a - c).collect(),
        g_y: lp.b().iter().zip(ax).map(|(b, a)| b - a).collect(),
    }
}

/// Maximiser of the gap objective over `W_r(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMaximum {
    pub point: PrimalDualPoint,
    pub value: f64,
    /// Path parameter; infinite when the path saturates inside the ball.
    pub lambda: f64,
}

/// Projection of `g` onto the tangent cone of `Z` at `z`.
fn tangent_projection(z: &PrimalDualPoint, g: &GapGradient) -> Vec<f64> {
    g.g_x
        .iter()
        .zip(&z.x)
        .map(|(&gi, &xi)| if xi == 0.0 { gi.max(0.0) } else { gi })
        .chain(g.g_y.iter().copied())
        .collect()
}

fn path_step(z: &PrimalDualPoint, g: &GapGradient, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let dx = g.g_x.iter().zip(&z.x).map(|(gi, xi)| (lambda * gi).max(-xi)).collect();
    let dy = g.g_y.iter().map(|gi| lambda * gi).collect();
    (dx, dy)
}

fn step_len(d: &(Vec<f64>, Vec<f64>)) -> f64 {
    (dot(&d.0, &d.0) + dot(&d.1, &d.1)).sqrt()
}

fn finish(z: &PrimalDualPoint, g: &GapGradient, d: (Vec<f64>, Vec<f64>), lambda: f64) -> BallMaximum {
    let value = dot(&g.g_x, &d.0) + dot(&g.g_y, &d.1);
    let x = z.x.iter().zip(&d.0).map(|(xi, di)| (xi + di).max(0.0)).collect();
    let y = z.y.iter().zip(&d.1).map(|(yi, di)| yi + di).collect();
    BallMaximum {
        point: PrimalDualPoint { x, y },
        value: value.max(0.0),
        lambda,
    }
}

pub fn max_over_ball(z: &PrimalDualPoint, g: &GapGradient, r: f64) -> Result<BallMaximum> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if z.x.len() != g.g_x.len() || z.y.len() != g.g_y.len() {
        return Err(Error::Dimension("point and gradient lengths differ".into()));
    }
    let projected = norm(&tangent_projection(z, g));
    if projected == 0.0 {
        return Ok(BallMaximum {
            point: z.clone(),
            value: 0.0,
            lambda: 0.0,
        });
    }

    // The path stays bounded iff no coordinate grows without limit.
    let bounded = g.g_x.iter().all(|&gi| gi <= 0.0) && g.g_y.iter().all(|&gi| gi == 0.0);
    if bounded {
        let sat: Vec<f64> = g.g_x.iter().zip(&z.x).map(|(&gi, &xi)| if gi < 0.0 { -xi } else { 0.0 }).collect();
        if norm(&sat) <= r {
            let d = (sat, vec![0.0; z.y.len()]);
            return Ok(finish(z, g, d, f64::INFINITY));
        }
    }

    let mut lo = r / projected;
    let d = path_step(z, g, lo);
    let len = step_len(&d);
    if (len - r).abs() <= BISECTION_RTOL * r {
        return Ok(finish(z, g, d, lo));
    }
    let mut hi = 2.0 * lo;
    while step_len(&path_step(z, g, hi)) < r {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if step_len(&path_step(z, g, mid)) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = path_step(z, g, lo);
    Ok(finish(z, g, d, lo))
}

/// `L(z)` from `c.x + y.(b - Ax) = c.x + y.g_y`.
fn lagrangian_from_gradient(lp: &StandardFormLP, z: &PrimalDualPoint, g: &GapGradient) -> f64 {
    dot(lp.c(), &z.x) + dot(&z.y, &g.g_y)
}

fn flush(value: f64, lagrangian: f64) -> f64 {
    if value < GAP_FLUSH * (1.0 + lagrangian.abs()) {
        0.0
    } else {
        value
    }
}

/// `rho_r(z)` from a precomputed gradient (no matrix-vector products).
pub fn rho_with_gradient(lp: &StandardFormLP, z: &PrimalDualPoint, g: &GapGradient, r: f64) -> Result<f64> {
    z.in_domain()?;
    let best = max_over_ball(z, g, r)?;
    Ok(flush(best.value, lagrangian_from_gradient(lp, z, g)) / r)
}

pub fn rho(lp: &StandardFormLP, z: &PrimalDualPoint, r: f64) -> Result<f64> {
    lp.check_point(z)?;
    z.in_domain()?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let g = gap_gradient(lp, z)?;
    rho_with_gradient(lp, z, &g, r)
}

/// `rho_0(z)` from a precomputed gradient.
pub fn rho_zero_with_gradient(lp: &StandardFormLP, z: &PrimalDualPoint, g: &GapGradient) -> Result<f64> {
    z.in_domain()?;
    let v = norm(&tangent_projection(z, g));
    Ok(flush(v, lagrangian_from_gradient(lp, z, g)))
}

/// `lim_{r -> 0+} rho_r(z)`: the norm of the gradient projected onto the
/// tangent cone of `Z` at `z`.
pub fn rho_zero(lp: &StandardFormLP, z: &PrimalDualPoint) -> Result<f64> {
    lp.check_point(z)?;
    let g = gap_gradient(lp, z)?;
    rho_zero_with_gradient(lp, z, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_model::lagrangian;
    use crate::sparse::SparseMatrix;

    fn lp1() -> StandardFormLP {
        let a = SparseMatrix::from_dense_rows(&[vec![1.0, 1.0]]).unwrap();
        StandardFormLP::new(a, vec![1.0], vec![1.0, 2.0]).unwrap()
    }

    fn pt(x: &[f64], y: &[f64]) -> PrimalDualPoint {
        PrimalDualPoint::new(x.to_vec(), y.to_vec())
    }

    #[test]
    fn gradient_spot_values() {
        let lp = lp1();
        let g = gap_gradient(&lp, &pt(&[0.0, 0.0], &[0.0])).unwrap();
        assert_eq!(g.g_x, vec![-1.0, -2.0]);
        assert_eq!(g.g_y, vec![1.0]);
        let g = gap_gradient(&lp, &pt(&[1.0, 0.0], &[1.0])).unwrap();
        assert_eq!(g.g_x, vec![0.0, -1.0]);
        assert_eq!(g.g_y, vec![0.0]);
    }

    #[test]
    fn gradient_matches_lagrangian_difference() {
        let lp = lp1();
        let z = pt(&[0.3, 1.7], &[-0.4]);
        let g = gap_gradient(&lp, &z).unwrap();
        for zhat in [pt(&[2.0, 0.0], &[1.0]), pt(&[0.0, 0.5], &[-3.0])] {
            let direct = lagrangian(&lp, &pt(&z.x, &zhat.y)).unwrap() - lagrangian(&lp, &pt(&zhat.x, &z.y)).unwrap();
            assert!((direct - g.gap_at(&z, &zhat)).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_spot_values() {
        let z = pt(&[0.0, 0.0], &[0.0]);
        let g = GapGradient { g_x: vec![1.0, 0.0], g_y: vec![0.0] };
        let m = max_over_ball(&z, &g, 1.0).unwrap();
        assert_eq!(m.point, pt(&[1.0, 0.0], &[0.0]));
        assert!((m.value - 1.0).abs() < 1e-12);

        let g = GapGradient { g_x: vec![-1.0, 1.0], g_y: vec![0.0] };
        let m = max_over_ball(&z, &g, 1.0).unwrap();
        assert!((m.point.x[1] - 1.0).abs() < 1e-12 && m.point.x[0] == 0.0);
        assert!((m.value - 1.0).abs() < 1e-12);

        let g = GapGradient { g_x: vec![0.0, 0.0], g_y: vec![0.0] };
        let m = max_over_ball(&z, &g, 1.0).unwrap();
        assert_eq!(m.point, z);
        assert_eq!(m.value, 0.0);

        assert!(max_over_ball(&z, &g, 0.0).is_err());
    }

    #[test]
    fn saturating_path_stays_inside_ball() {
        // all growth directions blocked: best move is to zero x_1
        let z = pt(&[0.5, 2.0], &[0.0]);
        let g = GapGradient { g_x: vec![-3.0, 0.0], g_y: vec![0.0] };
        let m = max_over_ball(&z, &g, 1.0).unwrap();
        assert!(m.lambda.is_infinite());
        assert!((m.value - 1.5).abs() < 1e-15);
        assert_eq!(m.point.x, vec![0.0, 2.0]);
    }

    #[test]
    fn rho_at_saddle_point_is_zero() {
        let lp = lp1();
        let zstar = pt(&[1.0, 0.0], &[1.0]);
        for r in [1e-3, 0.5, 1.0, 10.0] {
            assert_eq!(rho(&lp, &zstar, r).unwrap(), 0.0);
        }
        assert_eq!(rho_zero(&lp, &zstar).unwrap(), 0.0);
    }

    #[test]
    fn rho_zero_interior_is_gradient_norm() {
        let lp = lp1();
        let z = pt(&[0.5, 0.25], &[3.0]);
        let g = gap_gradient(&lp, &z).unwrap();
        let full = (dot(&g.g_x, &g.g_x) + dot(&g.g_y, &g.g_y)).sqrt();
        assert!((rho_zero(&lp, &z).unwrap() - full).abs() < 1e-15);
    }

    #[test]
    fn rho_rejects_points_outside_z() {
        let lp = lp1();
        assert!(matches!(rho(&lp, &pt(&[-1.0, 0.0], &[0.0]), 1.0), Err(Error::OutsideDomain { .. })));
    }
}
