//! Browser bindings: each entry point takes plain arguments and returns a
//! JSON string, with an `"error"` field when the request cannot be served.

use rpdhg::certify::{radius_r, solve_exact, OptimalSetProjector};
use rpdhg::gap::{rho, rho_zero};
use rpdhg::harness::generate;
use rpdhg::pdhg::{run_restarted, DistanceOracle, SolverConfig};
use rpdhg::tu::is_totally_unimodular;
use rpdhg::{PrimalDualPoint, SparseMatrix};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Cap on plotted restart-test evaluations.
const MAX_GAP_POINTS: usize = 4000;

fn error_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

#[derive(Serialize)]
struct EpochPoint {
    epoch: usize,
    iters: u64,
    tau: Option<usize>,
    kkt: f64,
    dist: Option<f64>,
    rho_ref: Option<f64>,
}

#[derive(Serialize)]
struct GapPoint {
    iter: u64,
    rho: f64,
}

#[derive(Serialize)]
struct SolveView {
    m1: usize,
    m2: usize,
    norm_a: f64,
    eta: f64,
    termination: &'static str,
    total_iters: u64,
    total_matvecs: u64,
    optimal_value: Option<f64>,
    epochs: Vec<EpochPoint>,
    gap_checks: Vec<GapPoint>,
}

fn solve_view(generator: &str, seed: u32, eta_scale: f64, beta: f64, tau0: u32) -> rpdhg::Result<SolveView> {
    if !(eta_scale > 0.0 && eta_scale < 1.0) {
        return Err(rpdhg::Error::InvalidParameter(format!("eta scale must lie in (0,1), got {eta_scale}")));
    }
    let lp = generate(generator, seed as u64)?;
    let face = solve_exact(&lp).ok();
    let projector = face.as_ref().and_then(|f| OptimalSetProjector::new(f).ok());
    let mut cfg = SolverConfig::for_problem(&lp);
    cfg.eta = eta_scale / lp.norm_a();
    cfg.beta = beta;
    cfg.tau0 = tau0 as usize;
    cfg.max_total_iters = 200_000;
    let log = run_restarted(
        &lp,
        &PrimalDualPoint::zeros(&lp),
        &cfg,
        projector.as_ref().map(|p| p as &dyn DistanceOracle),
    )?;
    let mut starts = std::collections::HashMap::new();
    for e in &log.epochs {
        starts.insert(e.epoch, e.iters_before);
    }
    let stride = log.gap_checks.len().div_ceil(MAX_GAP_POINTS).max(1);
    Ok(SolveView {
        m1: lp.m1(),
        m2: lp.m2(),
        norm_a: log.norm_a,
        eta: log.eta,
        termination: log.termination.as_str(),
        total_iters: log.total_iters,
        total_matvecs: log.total_matvecs,
        optimal_value: face.map(|f| f.value_f64()),
        epochs: log
            .epochs
            .iter()
            .map(|e| EpochPoint {
                epoch: e.epoch,
                iters: e.iters_before,
                tau: e.tau,
                kkt: e.kkt_norm,
                dist: e.dist_to_opt,
                rho_ref: e.rho_ref,
            })
            .collect(),
        gap_checks: log
            .gap_checks
            .iter()
            .step_by(stride)
            .map(|g| GapPoint {
                iter: starts.get(&g.epoch).copied().unwrap_or(0) + g.t as u64,
                rho: g.rho,
            })
            .collect(),
    })
}

/// Restarted solve from the origin; per-epoch KKT norms and oracle distances.
#[wasm_bindgen]
pub fn solve_demo(generator: &str, seed: u32, eta_scale: f64, beta: f64, tau0: u32) -> String {
    match solve_view(generator, seed, eta_scale, beta, tau0) {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(error_json),
        Err(e) => error_json(e),
    }
}

/// `rho_r(z)` on a log grid of `r` in `[1e-4, R]` at `z = scale * (1, ..., 1)`
/// (with `x` clipped at zero), together with `rho_0(z)`.
#[wasm_bindgen]
pub fn rho_curve(generator: &str, seed: u32, scale: f64, points: u32) -> String {
    let run = || -> rpdhg::Result<String> {
        let lp = generate(generator, seed as u64)?;
        let z = PrimalDualPoint::new(vec![scale.max(0.0); lp.m2()], vec![scale; lp.m1()]);
        let big = radius_r(&lp) as f64;
        let n = points.clamp(2, 400) as usize;
        let (lo, hi) = (1e-4f64.ln(), big.ln());
        let mut rs = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let r = (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp();
            rs.push(r);
            values.push(rho(&lp, &z, r)?);
        }
        Ok(json!({ "r": rs, "rho": values, "rho_zero": rho_zero(&lp, &z)?, "radius": big }).to_string())
    };
    run().unwrap_or_else(error_json)
}

/// Brute-force total-unimodularity test of a whitespace-separated integer
/// matrix, one row per line.
#[wasm_bindgen]
pub fn tu_check(matrix: &str) -> String {
    let run = || -> rpdhg::Result<String> {
        let rows: Vec<Vec<i64>> = matrix
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse().map_err(|_| rpdhg::Error::Parse {
                            line: i + 1,
                            msg: format!("expected an integer, found {t:?}"),
                        })
                    })
                    .collect()
            })
            .collect::<rpdhg::Result<_>>()?;
        if rows.is_empty() {
            return Err(rpdhg::Error::Dimension("empty matrix".into()));
        }
        let cert = is_totally_unimodular(&SparseMatrix::from_int_rows(&rows)?)?;
        serde_json::to_string(&cert).map_err(|e| rpdhg::Error::Io(e.to_string()))
    };
    run().unwrap_or_else(error_json)
}
