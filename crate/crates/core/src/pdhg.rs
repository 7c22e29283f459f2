//! PDHG iteration and the adaptive-restart outer loop.

use serde::{Deserialize, Serialize};

use crate::certify::radius_r;
use crate::error::{Error, Result};
use crate::gap::{gradient_from_products, rho_with_gradient, rho_zero_with_gradient};
use crate::lp_model::{kkt_from_products, PrimalDualPoint, StandardFormLP};

/// Mat-vecs charged to one PDHG step (`A^T y` and `A (2x+ - x)`).
pub const STEP_MATVECS: u64 = 2;
/// Mat-vecs charged to one gap or KKT evaluation (`A x` and `A^T y`).
pub const EVAL_MATVECS: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Step size; must satisfy `eta ||A||_2 < 1`.
    pub eta: f64,
    /// Restart contraction factor in (0, 1).
    pub beta: f64,
    /// Length of the first epoch.
    pub tau0: usize,
    pub max_epochs: usize,
    pub max_total_iters: u64,
    pub termination_kkt_tol: f64,
    /// The restart test runs on inner iterations divisible by this stride.
    pub gap_check_stride: usize,
    /// Radius used in the KKT termination test; `radius_r(lp)` when `None`.
    pub kkt_radius: Option<f64>,
    /// Keep every restart-test evaluation in the log.
    pub record_gap_checks: bool,
}

impl SolverConfig {
    /// Defaults: `eta = 1 / (2 ||A||_2)`, `beta = 1/e`, `tau0 = 1`.
    pub fn for_problem(lp: &StandardFormLP) -> Self {
        SolverConfig {
            eta: 0.5 / lp.norm_a(),
            ..Self::with_eta(1.0)
        }
    }

    pub fn with_eta(eta: f64) -> Self {
        SolverConfig {
            eta,
            beta: (-1.0f64).exp(),
            tau0: 1,
            max_epochs: 10_000,
            max_total_iters: 1_000_000,
            termination_kkt_tol: 1e-9,
            gap_check_stride: 1,
            kkt_radius: None,
            record_gap_checks: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("β ∈ (0,1) required, got {}", self.beta)));
        }
        if self.tau0 == 0 {
            return Err(Error::InvalidParameter("tau0 must be at least 1".into()));
        }
        if self.gap_check_stride == 0 {
            return Err(Error::InvalidParameter("gap_check_stride must be at least 1".into()));
        }
        if !(self.termination_kkt_tol >= 0.0) {
            return Err(Error::InvalidParameter("termination_kkt_tol must be nonnegative".into()));
        }
        if let Some(r) = self.kkt_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!("kkt_radius must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Distance from a point to the optimal set, supplied by an exact oracle.
pub trait DistanceOracle {
    fn distance(&self, z: &PrimalDualPoint) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// Zero normalized gap at a restart point.
    Optimal,
    KktTolerance,
    MaxEpochs,
    MaxTotalIters,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Optimal => "optimal",
            TerminationReason::KktTolerance => "kkt_tolerance",
            TerminationReason::MaxEpochs => "max_epochs",
            TerminationReason::MaxTotalIters => "max_total_iters",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Inner iterations run in this epoch; `None` for the terminal start point.
    pub tau: Option<usize>,
    /// `rho` at the epoch start relative to the previous start (epochs >= 1).
    pub rho_ref: Option<f64>,
    /// Gap value that triggered the restart.
    pub rho_at_restart: Option<f64>,
    /// Total inner iterations before this epoch started.
    pub iters_before: u64,
    pub kkt_norm: f64,
    pub start_norm: f64,
    /// `||z^{n,0} - z^{0,0}||_2`.
    pub drift: f64,
    pub dist_to_opt: Option<f64>,
}

impl EpochRecord {
    pub fn inner_iter_total(&self) -> u64 {
        self.iters_before + self.tau.unwrap_or(0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub epoch: usize,
    pub t: usize,
    pub radius: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLog {
    pub epochs: Vec<EpochRecord>,
    pub gap_checks: Vec<GapCheck>,
    pub total_iters: u64,
    pub gap_evals: u64,
    pub kkt_evals: u64,
    pub total_matvecs: u64,
    pub termination: TerminationReason,
    pub final_point: PrimalDualPoint,
    pub eta: f64,
    pub norm_a: f64,
}

impl ConvergenceLog {
    /// Checks `total = 2 * iters + 2 * (gap evals + kkt evals)`.
    pub fn matvecs_reconcile(&self) -> bool {
        self.total_matvecs == STEP_MATVECS * self.total_iters + EVAL_MATVECS * (self.gap_evals + self.kkt_evals)
    }
}

/// Scratch buffers for one step.
struct Workspace {
    aty: Vec<f64>,
    ax: Vec<f64>,
    extrap: Vec<f64>,
}

impl Workspace {
    fn new(lp: &StandardFormLP) -> Self {
        Workspace {
            aty: vec![0.0; lp.m2()],
            ax: vec![0.0; lp.m1()],
            extrap: vec![0.0; lp.m2()],
        }
    }
}

fn step_into(lp: &StandardFormLP, z: &PrimalDualPoint, eta: f64, ws: &mut Workspace) -> PrimalDualPoint {
    lp.a().tmul_vec_into(&z.y, &mut ws.aty);
    let x_new: Vec<f64> = z
        .x
        .iter()
        .zip(lp.c())
        .zip(&ws.aty)
        .map(|((&xi, &ci), &ai)| (xi - eta * (ci - ai)).max(0.0))
        .collect();
    for ((e, &xn), &xo) in ws.extrap.iter_mut().zip(&x_new).zip(&z.x) {
        *e = 2.0 * xn - xo;
    }
    lp.a().mul_vec_into(&ws.extrap, &mut ws.ax);
    let y_new = z
        .y
        .iter()
        .zip(lp.b())
        .zip(&ws.ax)
        .map(|((&yi, &bi), &ai)| yi + eta * (bi - ai))
        .collect();
    PrimalDualPoint { x: x_new, y: y_new }
}

/// One PDHG step:
/// `x+ = max(x - eta (c - A^T y), 0)`, `y+ = y + eta (b - A (2x+ - x))`.
pub fn pdhg_step(lp: &StandardFormLP, z: &PrimalDualPoint, eta: f64) -> Result<PrimalDualPoint> {
    lp.check_point(z)?;
    let mut ws = Workspace::new(lp);
    Ok(step_into(lp, z, eta, &mut ws))
}

/// Incremental mean: `avg + (new - avg) / (t + 1)` where `avg` averages `t` points.
pub fn running_average(prev_avg: &PrimalDualPoint, new_point: &PrimalDualPoint, t: usize) -> PrimalDualPoint {
    let w = 1.0 / (t as f64 + 1.0);
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
        if t == 0 {
            b.to_vec()
        } else {
            a.iter().zip(b).map(|(ai, bi)| ai + (bi - ai) * w).collect()
        }
    };
    PrimalDualPoint {
        x: mix(&prev_avg.x, &new_point.x),
        y: mix(&prev_avg.y, &new_point.y),
    }
}

struct Counters {
    total_iters: u64,
    gap_evals: u64,
    kkt_evals: u64,
    matvecs: u64,
}

struct Evaluation {
    ax: Vec<f64>,
    aty: Vec<f64>,
}

fn evaluate(lp: &StandardFormLP, z: &PrimalDualPoint, counters: &mut Counters) -> Evaluation {
    counters.matvecs += EVAL_MATVECS;
    Evaluation {
        ax: lp.a().mul_vec(&z.x),
        aty: lp.a().tmul_vec(&z.y),
    }
}

/// `rho_{||z - anchor||}(z)`, falling back to `rho_0(z)` when `z == anchor`.
fn anchored_rho(lp: &StandardFormLP, z: &PrimalDualPoint, anchor: &PrimalDualPoint, eval: &Evaluation) -> Result<(f64, f64)> {
    let g = gradient_from_products(lp, &eval.ax, &eval.aty);
    let radius = z.distance(anchor);
    let value = if radius > 0.0 {
        rho_with_gradient(lp, z, &g, radius)?
    } else {
        rho_zero_with_gradient(lp, z, &g)?
    };
    Ok((radius, value))
}

/// Restarted PDHG with adaptive restarts.
///
/// Epoch 0 runs exactly `tau0` steps. Every later epoch `n` fixes
/// `rho_ref = rho_{||z^{n,0} - z^{n-1,0}||}(z^{n,0})` at its start and runs
/// until the running average `zbar` satisfies
/// `rho_{||zbar - z^{n,0}||}(zbar) <= beta * rho_ref`, then restarts from
/// `zbar`. Termination is checked at restart points.
pub fn run_restarted(
    lp: &StandardFormLP,
    z0: &PrimalDualPoint,
    config: &SolverConfig,
    oracle: Option<&dyn DistanceOracle>,
) -> Result<ConvergenceLog> {
    config.validate()?;
    lp.check_point(z0)?;
    z0.in_domain()?;
    let norm_a = lp.norm_a();
    let product = config.eta * norm_a;
    if product >= 1.0 {
        return Err(Error::StepTooLarge { product });
    }
    let kkt_radius = match config.kkt_radius {
        Some(r) => r,
        None => radius_r(lp) as f64,
    };

    let mut counters = Counters {
        total_iters: 0,
        gap_evals: 0,
        kkt_evals: 0,
        matvecs: 0,
    };
    let mut epochs: Vec<EpochRecord> = Vec::new();
    let mut gap_checks = Vec::new();
    let mut ws = Workspace::new(lp);

    let origin = z0.clone();
    let mut start = z0.clone();
    let mut prev_start: Option<PrimalDualPoint> = None;
    let mut epoch = 0usize;

    let termination = loop {
        let eval = evaluate(lp, &start, &mut counters);
        counters.kkt_evals += 1;
        let kkt_norm = kkt_from_products(lp, &start, &eval.ax, &eval.aty, kkt_radius).norm;
        let mut record = EpochRecord {
            epoch,
            tau: None,
            rho_ref: None,
            rho_at_restart: None,
            iters_before: counters.total_iters,
            kkt_norm,
            start_norm: start.norm(),
            drift: start.distance(&origin),
            dist_to_opt: oracle.map(|o| o.distance(&start)),
        };

        let mut rho_ref = 0.0;
        if let Some(prev) = &prev_start {
            // the KKT evaluation already produced A x and A^T y at `start`
            let (_, value) = anchored_rho(lp, &start, prev, &eval)?;
            rho_ref = value;
            record.rho_ref = Some(value);
            if value == 0.0 {
                epochs.push(record);
                break TerminationReason::Optimal;
            }
            if kkt_norm <= config.termination_kkt_tol {
                epochs.push(record);
                break TerminationReason::KktTolerance;
            }
        }
        if epoch >= config.max_epochs {
            epochs.push(record);
            break TerminationReason::MaxEpochs;
        }
        if counters.total_iters >= config.max_total_iters {
            epochs.push(record);
            break TerminationReason::MaxTotalIters;
        }

        let mut z = start.clone();
        let mut avg = start.clone();
        let mut t = 0usize;
        let mut out_of_budget = false;
        loop {
            z = step_into(lp, &z, config.eta, &mut ws);
            avg = running_average(&avg, &z, t);
            t += 1;
            counters.total_iters += 1;
            counters.matvecs += STEP_MATVECS;

            if epoch == 0 {
                if t >= config.tau0 {
                    break;
                }
            } else if t % config.gap_check_stride == 0 {
                let eval = evaluate(lp, &avg, &mut counters);
                counters.gap_evals += 1;
                let (radius, value) = anchored_rho(lp, &avg, &start, &eval)?;
                if config.record_gap_checks {
                    gap_checks.push(GapCheck {
                        epoch,
                        t,
                        radius,
                        rho: value,
                    });
                }
                if value <= config.beta * rho_ref {
                    record.rho_at_restart = Some(value);
                    break;
                }
            }
            if counters.total_iters >= config.max_total_iters {
                out_of_budget = true;
                break;
            }
        }
        record.tau = Some(t);
        epochs.push(record);
        if out_of_budget {
            break TerminationReason::MaxTotalIters;
        }
        prev_start = Some(std::mem::replace(&mut start, avg));
        epoch += 1;
    };

    // a budget stop mid-epoch still reports the last restart point
    let final_point = start;
    Ok(ConvergenceLog {
        epochs,
        gap_checks,
        total_iters: counters.total_iters,
        gap_evals: counters.gap_evals,
        kkt_evals: counters.kkt_evals,
        total_matvecs: counters.matvecs,
        termination,
        final_point,
        eta: config.eta,
        norm_a,
    })
}

/// `theta = 2 sqrt((1 + eta ||A||) / (1 - eta ||A||))`.
pub fn theta(eta: f64, norm_a: f64) -> f64 {
    let p = eta * norm_a;
    2.0 * ((1.0 + p) / (1.0 - p)).sqrt()
}
