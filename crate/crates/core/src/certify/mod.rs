//! Exact desk-scale oracles and numerical verification of the constants
//! that govern restarted PDHG on totally unimodular programs.

mod enumerate;
mod hoffman;
mod oracle;
mod projection;
mod schur;
mod sharpness;

pub use enumerate::{binomial, enumeration_count, SubmatrixWitness, MAX_ENUMERATION};
pub use hoffman::{hoffman_alpha, hoffman_inequality_check, HoffmanCheck, HoffmanConstant, HoffmanSystem};
pub use oracle::{distance_to_optimal, solve_exact, OptimalFace, OptimalFaceSummary, OptimalSetProjector};
pub use projection::{Polyhedron, PolyhedronProjector, Projection, MAX_PROJECTION_INEQUALITIES};
pub use schur::{default_lambdas, schur_limit_check, SchurReport};
pub use sharpness::{
    rank_one_bound, sharpness_alpha, sharpness_stack, sherman_morrison_bound_check, theoretical_alpha_lower,
    ShermanMorrisonCheck, SharpnessReport,
};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lp_model::StandardFormLP;

/// `R = ceil(8 m1^1.5 H)`, floored at 1 so that `R > 0` for all-zero data.
///
/// Integer `H` is handled exactly: `R` is the smallest integer with
/// `R^2 >= 64 m1^3 H^2`.
pub fn radius_r(lp: &StandardFormLP) -> u64 {
    radius_from(lp.m1(), lp.h())
}

pub fn radius_from(m1: usize, h: f64) -> u64 {
    let r = if h.fract() == 0.0 && h < 9.0e15 {
        let m = BigInt::from(m1 as u64);
        let hh = BigInt::from(h as u64);
        let v: BigInt = BigInt::from(64u32) * &m * &m * &m * &hh * &hh;
        let s = v.sqrt();
        let s = if &s * &s < v { s + 1 } else { s };
        s.to_u64().unwrap_or(u64::MAX)
    } else {
        (8.0 * (m1 as f64).powf(1.5) * h).ceil() as u64
    };
    r.max(1)
}

/// Restart-length bound `t* = ceil(2 C (q + 2) / (alpha beta))` with
/// `C = 2 / (eta (1 - eta ||A||))` and `q = 4 (1 + eta ||A||) / (1 - eta ||A||)`.
pub fn theoretical_tstar(alpha: f64, eta: f64, norm_a: f64, beta: f64) -> Result<u64> {
    let p = eta * norm_a;
    if !(eta > 0.0 && p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < eta ||A|| < 1, got {p}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("β ∈ (0,1) required, got {beta}")));
    }
    let c = 2.0 / (eta * (1.0 - p));
    let q = 4.0 * (1.0 + p) / (1.0 - p);
    let t = (2.0 * c * (q + 2.0) / (alpha * beta)).ceil();
    Ok(if t >= u64::MAX as f64 { u64::MAX } else { t as u64 })
}
