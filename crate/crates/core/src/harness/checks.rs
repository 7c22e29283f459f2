//! Individual verification checks run by the harness.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{
    default_lambdas, hoffman_inequality_check, schur_limit_check, sherman_morrison_bound_check, HoffmanSystem, OptimalFace,
    SharpnessReport,
};
use crate::error::{Error, Result};
use crate::exact::{q_from_f64, q_int, IntMatrix};
use crate::gap::rho;
use crate::lp_model::{kkt_residual, PrimalDualPoint, StandardFormLP};
use crate::pdhg::{theta, ConvergenceLog, DistanceOracle};
use crate::sparse::SparseMatrix;
use crate::tu::{is_totally_unimodular, tu_inverse_check};

pub const DIST_TOL: f64 = 1e-8;
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    pub fn verdict(name: &str, pass: bool, measured: f64, bound: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: Some(measured),
            bound: Some(bound),
            detail,
        }
    }

    pub fn disabled(name: &str, reason: String) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Disabled,
            measured: None,
            bound: None,
            detail: reason,
        }
    }

    pub fn failed(name: &str, reason: String) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Fail,
            measured: None,
            bound: None,
            detail: reason,
        }
    }
}

/// Per-epoch `||z^{n,0} - z^{0,0}|| <= theta dist(z^{0,0}, Z*)`.
pub fn theta_ball(log: &ConvergenceLog, d0: f64) -> (CheckResult, Vec<bool>) {
    let bound = theta(log.eta, log.norm_a) * d0;
    let flags: Vec<bool> = log.epochs.iter().map(|e| e.drift <= bound + DIST_TOL).collect();
    let worst = log.epochs.iter().map(|e| e.drift).fold(0.0, f64::max);
    let bad = flags.iter().filter(|&&f| !f).count();
    let res = CheckResult::verdict(
        "theta_ball",
        bad == 0,
        worst,
        bound,
        format!("{bad} of {} epochs outside the ball", flags.len()),
    );
    (res, flags)
}

/// Per-epoch `tau^n <= t*`.
pub fn tstar_bound(log: &ConvergenceLog, tstar: u64) -> (CheckResult, Vec<bool>) {
    let flags: Vec<bool> = log.epochs.iter().map(|e| e.tau.is_none_or(|t| t as u64 <= tstar)).collect();
    let worst = log.epochs.iter().filter_map(|e| e.tau).max().unwrap_or(0);
    let bad = flags.iter().filter(|&&f| !f).count();
    let res = CheckResult::verdict(
        "tstar",
        bad == 0,
        worst as f64,
        tstar as f64,
        format!("{bad} of {} epochs longer than t*", flags.len()),
    );
    (res, flags)
}

/// `dist(z^{n,0}, Z*) <= beta^n (t* / tau0) dist(z^{0,0}, Z*)` at every epoch.
pub fn linear_decay(log: &ConvergenceLog, beta: f64, tstar: u64, tau0: usize, d0: f64) -> CheckResult {
    let mut worst_ratio = 0.0f64;
    let mut bad = 0;
    let mut missing = 0;
    for e in &log.epochs {
        let Some(d) = e.dist_to_opt else {
            missing += 1;
            continue;
        };
        let bound = beta.powi(e.epoch as i32) * (tstar as f64 / tau0 as f64) * d0;
        if d > bound + DIST_TOL {
            bad += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(d / bound);
        } else if d > 0.0 {
            worst_ratio = f64::INFINITY;
        }
    }
    if missing > 0 {
        return CheckResult::failed("linear_decay", format!("{missing} epochs lack an oracle distance"));
    }
    CheckResult::verdict(
        "linear_decay",
        bad == 0,
        worst_ratio,
        1.0,
        format!("max dist / bound over {} epochs; {bad} violations", log.epochs.len()),
    )
}

/// Uniform-radius sample from `{z in Z : ||z|| <= radius}`.
pub fn sample_ball_point(rng: &mut ChaCha8Rng, m1: usize, m2: usize, radius: f64) -> PrimalDualPoint {
    let dim = m1 + m2;
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let s: f64 = rng.gen_range(0.0..1.0) * radius / n;
    v.iter_mut().for_each(|a| *a *= s);
    let mut z = PrimalDualPoint::from_stacked(&v, m2);
    z.x.iter_mut().for_each(|a| *a = a.abs());
    z
}

/// Log-uniform radius in `[1e-6 R, R]`.
pub fn sample_radius(rng: &mut ChaCha8Rng, radius: f64) -> f64 {
    radius * 10f64.powf(-6.0 * rng.gen_range(0.0..1.0))
}

pub struct SharpnessSamples {
    pub sharpness: CheckResult,
    pub gap_lower_bound: CheckResult,
}

/// `alpha dist(z, Z*) <= rho_r(z)` and `kkt(z, R) / 2 <= rho_r(z)` on
/// random `z` with `||z|| <= R` and `r` in `(0, R]`.
pub fn sharpness_samples(
    lp: &StandardFormLP,
    alpha: f64,
    radius: u64,
    oracle: &dyn DistanceOracle,
    samples: usize,
    seed: u64,
) -> Result<SharpnessSamples> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_big = radius as f64;
    let (mut sharp_bad, mut gap_bad) = (0, 0);
    let (mut sharp_worst, mut gap_worst) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples {
        let z = sample_ball_point(&mut rng, lp.m1(), lp.m2(), r_big);
        let r = sample_radius(&mut rng, r_big);
        let value = rho(lp, &z, r)?;
        let lhs = alpha * oracle.distance(&z);
        sharp_worst = sharp_worst.max(lhs - value);
        if lhs > value + DIST_TOL {
            sharp_bad += 1;
        }
        let half_kkt = 0.5 * kkt_residual(lp, &z, r_big)?.norm;
        gap_worst = gap_worst.max(half_kkt - value);
        if half_kkt > value + GAP_TOL {
            gap_bad += 1;
        }
    }
    Ok(SharpnessSamples {
        sharpness: CheckResult::verdict(
            "sharpness",
            sharp_bad == 0,
            sharp_worst,
            DIST_TOL,
            format!("max alpha dist - rho over {samples} samples; {sharp_bad} violations"),
        ),
        gap_lower_bound: CheckResult::verdict(
            "gap_lower_bound",
            gap_bad == 0,
            gap_worst,
            GAP_TOL,
            format!("max kkt/2 - rho over {samples} samples; {gap_bad} violations"),
        ),
    })
}

pub fn alpha_lower(report: &SharpnessReport) -> CheckResult {
    CheckResult::verdict(
        "sharpness_alpha_lower",
        report.alpha >= report.theoretical_alpha_lower,
        report.alpha,
        report.theoretical_alpha_lower,
        format!("{} nonsingular of {} submatrices", report.nonsingular, report.submatrices_checked),
    )
}

pub fn optimal_norm(lp: &StandardFormLP, face: &OptimalFace) -> CheckResult {
    let norm = face.representative().norm();
    let bound = 2.0 * (lp.m1() as f64).powf(1.5) * lp.h();
    CheckResult::verdict("optimal_norm", norm <= bound, norm, bound, "||z*|| of the representative vertex pair".into())
}

/// Hoffman inequality for the primal feasible set `{x >= 0 : Ax = b}`.
pub fn hoffman(lp: &StandardFormLP, samples: usize, seed: u64) -> Result<CheckResult> {
    let conv = |v: f64| q_from_f64(v).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {v}")));
    let mut f = vec![vec![q_int(0); lp.m2()]; lp.m1()];
    for (i, j, v) in lp.a().triplets() {
        f[i][j] = conv(v)?;
    }
    let system = HoffmanSystem {
        dim: lp.m2(),
        d: vec![],
        d_rhs: vec![],
        f,
        f_rhs: lp.b().iter().map(|&v| conv(v)).collect::<Result<_>>()?,
        sign_set: (0..lp.m2()).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 * lp.h().max(1.0);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..lp.m2()).map(|_| rng.gen_range(0.0..scale)).collect())
        .collect();
    let chk = hoffman_inequality_check(&system, &points)?;
    Ok(CheckResult::verdict(
        "hoffman",
        chk.violations == 0,
        chk.worst_ratio,
        1.0,
        format!("alpha = {}; {} violations over {} samples", chk.alpha, chk.violations, chk.samples),
    ))
}

/// Rank-one bound on random `[v^T; V]` with `V` an `n x (n+1)` submatrix of `A`.
pub fn rank_one(lp: &StandardFormLP, stacks: usize, seed: u64) -> Result<CheckResult> {
    let rows = lp.a().to_int_rows()?;
    let (m1, m2) = (lp.m1(), lp.m2());
    if m2 < 2 {
        return Err(Error::InvalidParameter("need at least two columns".into()));
    }
    let cert = is_totally_unimodular(lp.a())?;
    if !cert.verdict {
        let det = cert.witness.map(|w| w.det).unwrap_or_default();
        return Err(Error::NotTotallyUnimodular { det });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut attempts, mut bad) = (0, 0, 0);
    let mut worst = 0.0f64;
    while done < stacks && attempts < 100 * stacks {
        attempts += 1;
        let n = rng.gen_range(1..=m1.min(m2 - 1));
        let mut rs = sample(&mut rng, m1, n).into_vec();
        let mut cs = sample(&mut rng, m2, n + 1).into_vec();
        rs.sort_unstable();
        cs.sort_unstable();
        let v_mat: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
        let m: u64 = rng.gen_range(1..=16);
        let numerators: Vec<i64> = (0..=n).map(|_| rng.gen_range(-(m as i64)..=m as i64)).collect();
        match sherman_morrison_bound_check(&numerators, m, &v_mat) {
            Ok(chk) => {
                done += 1;
                worst = worst.max(chk.measured / chk.bound);
                if !chk.holds {
                    bad += 1;
                }
            }
            Err(Error::Singular) => {}
            Err(e) => return Err(e),
        }
    }
    if done < stacks {
        return Ok(CheckResult::failed(
            "rank_one",
            format!("only {done} nonsingular stacks in {attempts} attempts"),
        ));
    }
    Ok(CheckResult::verdict(
        "rank_one",
        bad == 0,
        worst,
        1.0,
        format!("max measured / bound over {done} stacks; {bad} violations"),
    ))
}

/// Inverse-linear decay of the block-triangular inverse on random blocks.
pub fn schur(systems: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = default_lambdas();
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..systems {
        let p = rng.gen_range(1..=3);
        let q = rng.gen_range(1..=3);
        let mut block = |r: usize, c: usize, shift: f64| {
            DMatrix::from_fn(r, c, |i, j| rng.gen_range(-1.0..1.0) + if i == j { shift } else { 0.0 })
        };
        let m11 = block(p, p, 3.0);
        let m12 = block(p, q, 0.0);
        let m22 = block(q, q, 3.0);
        let rep = schur_limit_check(&m11, &m12, &m22, &lambdas)?;
        let dev = (rep.slope + 1.0).abs();
        worst = worst.max(dev);
        if dev > 0.1 || !rep.decays_inverse_linearly {
            bad += 1;
        }
    }
    Ok(CheckResult::verdict(
        "schur",
        bad == 0,
        worst,
        0.1,
        format!("max |slope + 1| over {systems} block systems; {bad} failures"),
    ))
}

/// Total unimodularity of `A` and the inverse property on sampled square
/// nonsingular submatrices.
pub fn tu(lp: &StandardFormLP, inverse_samples: usize, seed: u64) -> Result<CheckResult> {
    let cert = is_totally_unimodular(lp.a())?;
    if !cert.verdict {
        let w = cert.witness.expect("a failed verdict carries a witness");
        return Ok(CheckResult::verdict(
            "tu",
            false,
            w.det.parse().unwrap_or(f64::INFINITY),
            1.0,
            format!("submatrix rows {:?} cols {:?} has determinant {}", w.rows, w.cols, w.det),
        ));
    }
    let rows = lp.a().to_int_rows()?;
    let exact = IntMatrix::from_i64(&rows);
    let (m1, m2) = (lp.m1(), lp.m2());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 * inverse_samples {
        if found == inverse_samples {
            break;
        }
        let k = rng.gen_range(1..=m1.min(m2));
        let mut rs = sample(&mut rng, m1, k).into_vec();
        let mut cs = sample(&mut rng, m2, k).into_vec();
        rs.sort_unstable();
        cs.sort_unstable();
        if exact.submatrix_det(&rs, &cs) == 0.into() {
            continue;
        }
        let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
        match tu_inverse_check(&SparseMatrix::from_int_rows(&sub)?) {
            Ok(rep) => worst = worst.max(rep.inverse_norm / k as f64),
            Err(Error::BoundViolated(msg)) => return Ok(CheckResult::failed("tu", msg)),
            Err(e) => return Err(e),
        }
        found += 1;
    }
    Ok(CheckResult::verdict(
        "tu",
        true,
        worst,
        1.0,
        format!(
            "{} submatrices checked; max ||G^-1|| / size over {found} sampled inverses",
            cert.submatrices_checked
        ),
    ))
}
