//! Experiment runner: instance loading, a restarted solve, verification
//! checks, and deterministic CSV/JSON artifacts.

pub mod checks;
mod csv_log;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checks::{CheckResult, CheckStatus};
pub use csv_log::{convergence_csv, csv_rows, emit_convergence_csv, parse_convergence_csv, CsvEpochRow, CSV_HEADER};

use crate::certify::{radius_r, sharpness_alpha, solve_exact, theoretical_tstar, OptimalFace, OptimalFaceSummary, OptimalSetProjector, SharpnessReport};
use crate::error::{Error, Result};
use crate::io::{load_instance, parse_generator_config};
use crate::lp_model::{PrimalDualPoint, StandardFormLP};
use crate::pdhg::{run_restarted, DistanceOracle, SolverConfig};
use crate::sparse::SparseMatrix;
use crate::tu::{gen_assignment, gen_min_cost_flow, random_assignment_costs, FlowInstanceSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

const SHARPNESS_SAMPLES: usize = 200;
const HOFFMAN_SAMPLES: usize = 200;
const RANK_ONE_STACKS: usize = 100;
const SCHUR_SYSTEMS: usize = 10;
const TU_INVERSE_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ThetaBall,
    Tstar,
    LinearDecay,
    Sharpness,
    Hoffman,
    RankOne,
    Schur,
    Tu,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::ThetaBall,
        CheckKind::Tstar,
        CheckKind::LinearDecay,
        CheckKind::Sharpness,
        CheckKind::Hoffman,
        CheckKind::RankOne,
        CheckKind::Schur,
        CheckKind::Tu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::ThetaBall => "theta_ball",
            CheckKind::Tstar => "tstar",
            CheckKind::LinearDecay => "linear_decay",
            CheckKind::Sharpness => "sharpness",
            CheckKind::Hoffman => "hoffman",
            CheckKind::RankOne => "rank_one",
            CheckKind::Schur => "schur",
            CheckKind::Tu => "tu",
        }
    }

    fn needs_solve(self) -> bool {
        matches!(self, CheckKind::ThetaBall | CheckKind::Tstar | CheckKind::LinearDecay)
    }

    fn needs_oracle(self) -> bool {
        self.needs_solve() || self == CheckKind::Sharpness
    }

    fn needs_alpha(self) -> bool {
        matches!(self, CheckKind::Tstar | CheckKind::LinearDecay | CheckKind::Sharpness)
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check {s:?}")))
    }
}

/// `all`, `none`, or a comma-separated list of check names.
pub fn parse_checks(s: &str) -> Result<Vec<CheckKind>> {
    let s = s.trim();
    match s {
        "all" => return Ok(CheckKind::ALL.to_vec()),
        "none" | "" => return Ok(Vec::new()),
        _ => {}
    }
    let mut out: Vec<CheckKind> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceSource {
    File(PathBuf),
    /// `lp1`, `triangle`, `path3`, `flow:N:ARCS`, `assignment:N`, or a
    /// generator config file.
    Generator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub source: InstanceSource,
    pub seed: u64,
    /// Step size as a fraction of `1 / ||A||_2`.
    pub eta_scale: f64,
    pub beta: f64,
    pub tau0: usize,
    pub kkt_tol: f64,
    pub max_total_iters: u64,
    pub solve: bool,
    pub checks: Vec<CheckKind>,
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn new(source: InstanceSource) -> Self {
        ExperimentSpec {
            source,
            seed: 0,
            eta_scale: 0.5,
            beta: (-1.0f64).exp(),
            tau0: 1,
            kkt_tol: 1e-9,
            max_total_iters: 1_000_000,
            solve: true,
            checks: Vec::new(),
            out_dir: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("β ∈ (0,1) required, got {}", self.beta)));
        }
        if !(self.eta_scale > 0.0 && self.eta_scale < 1.0) {
            return Err(Error::InvalidParameter(format!("eta scale must lie in (0,1), got {}", self.eta_scale)));
        }
        if self.tau0 == 0 {
            return Err(Error::InvalidParameter("tau0 must be at least 1".into()));
        }
        if !(self.kkt_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("kkt tolerance must be nonnegative, got {}", self.kkt_tol)));
        }
        if !self.solve && self.checks.is_empty() {
            return Err(Error::InvalidParameter("nothing to do: no solve and no checks requested".into()));
        }
        Ok(())
    }

    fn runs_solver(&self) -> bool {
        self.solve || self.checks.iter().any(|c| c.needs_solve())
    }

    fn wants(&self, kind: CheckKind) -> bool {
        self.checks.contains(&kind)
    }
}

pub fn triangle_spec() -> FlowInstanceSpec {
    FlowInstanceSpec {
        nodes: 3,
        arcs: vec![(0, 1), (1, 2), (0, 2)],
        supplies: vec![1, 0, -1],
        costs: vec![1, 1, 1],
        drop_last_row: true,
    }
}

pub fn path3_spec() -> FlowInstanceSpec {
    FlowInstanceSpec {
        nodes: 3,
        arcs: vec![(0, 1), (1, 2)],
        supplies: vec![1, 0, -1],
        costs: vec![1, 1],
        drop_last_row: true,
    }
}

/// `min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0`.
pub fn lp1() -> StandardFormLP {
    let a = SparseMatrix::from_int_rows(&[vec![1, 1]]).expect("valid matrix");
    StandardFormLP::new(a, vec![1.0], vec![1.0, 2.0]).expect("valid program")
}

pub fn generate(name: &str, seed: u64) -> Result<StandardFormLP> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("bad size {s:?} in generator {name:?}")))
    };
    match parts.as_slice() {
        ["lp1"] => Ok(lp1()),
        ["triangle"] => gen_min_cost_flow(&triangle_spec()),
        ["path3"] => gen_min_cost_flow(&path3_spec()),
        ["flow", n, arcs] => gen_min_cost_flow(&FlowInstanceSpec::random(num(n)?, num(arcs)?, 3, seed)?),
        ["assignment", n] => gen_assignment(&random_assignment_costs(num(n)?, 3, seed)),
        _ if Path::new(name).is_file() => {
            let text = std::fs::read_to_string(name).map_err(|e| Error::Io(format!("{name}: {e}")))?;
            gen_min_cost_flow(&parse_generator_config(&text)?.to_spec(seed)?)
        }
        _ => Err(Error::InvalidParameter(format!(
            "unknown generator {name:?}; expected lp1, triangle, path3, flow:N:ARCS, assignment:N or a config file"
        ))),
    }
}

pub fn load_source(source: &InstanceSource, seed: u64) -> Result<StandardFormLP> {
    match source {
        InstanceSource::File(p) => load_instance(p),
        InstanceSource::Generator(g) => generate(g, seed),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub source: String,
    pub m1: usize,
    pub m2: usize,
    pub nnz: usize,
    pub h: f64,
    pub norm_a: f64,
    pub radius: u64,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub eta: f64,
    pub beta: f64,
    pub tau0: usize,
    pub termination: String,
    pub epochs: usize,
    pub total_iters: u64,
    pub total_matvecs: u64,
    pub gap_evals: u64,
    pub kkt_evals: u64,
    pub matvecs_reconcile: bool,
    pub final_kkt_norm: f64,
    pub final_dist_to_opt: Option<f64>,
    pub final_point: PrimalDualPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub instance: InstanceSummary,
    pub solve: Option<SolveSummary>,
    pub optimum: Option<OptimalFaceSummary>,
    pub alpha: Option<f64>,
    pub tstar: Option<u64>,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub summary: ExperimentSummary,
    pub csv_rows: Vec<CsvEpochRow>,
}

impl ExperimentReport {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.summary)
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string()))
    }

    pub fn csv(&self) -> Result<String> {
        convergence_csv(&self.csv_rows)
    }

    /// Writes `convergence.csv` (when a solve ran) and `summary.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        if !self.csv_rows.is_empty() {
            emit_convergence_csv(&self.csv_rows, &dir.join("convergence.csv"))?;
        }
        let path = dir.join("summary.json");
        std::fs::write(&path, self.summary_json()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// The artifact selected by `format`.
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv if !self.csv_rows.is_empty() => self.csv(),
            _ => self.summary_json(),
        }
    }
}

/// Maps a library error to the process exit status.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::GuardExceeded(_) => EXIT_GUARD,
        _ => EXIT_CONFIG,
    }
}

fn guard_like(err: &Error) -> bool {
    matches!(
        err,
        Error::GuardExceeded(_)
            | Error::Infeasible
            | Error::Unbounded
            | Error::NotInteger
            | Error::NoNonsingularSubmatrix
            | Error::EmptySet
            | Error::NotTotallyUnimodular { .. }
    )
}

struct Oracle {
    face: OptimalFace,
    projector: OptimalSetProjector,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let lp = load_source(&spec.source, spec.seed)?;
    let radius = radius_r(&lp);
    let mut warnings = Vec::new();
    let mut disabled: Vec<(CheckKind, String)> = Vec::new();

    let oracle = if spec.checks.iter().any(|c| c.needs_oracle()) {
        match solve_exact(&lp).and_then(|face| {
            let projector = OptimalSetProjector::new(&face)?;
            Ok(Oracle { face, projector })
        }) {
            Ok(o) => Some(o),
            Err(e) if guard_like(&e) => {
                warnings.push(format!("exact oracle unavailable: {e}"));
                for &k in spec.checks.iter().filter(|k| k.needs_oracle()) {
                    disabled.push((k, format!("exact oracle unavailable: {e}")));
                }
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let sharp: Option<SharpnessReport> = if oracle.is_some() && spec.checks.iter().any(|c| c.needs_alpha()) {
        match sharpness_alpha(&lp, radius) {
            Ok(r) => Some(r),
            Err(e) if guard_like(&e) => {
                warnings.push(format!("sharpness constant unavailable: {e}"));
                for &k in spec.checks.iter().filter(|k| k.needs_alpha()) {
                    disabled.push((k, format!("sharpness constant unavailable: {e}")));
                }
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let norm_a = lp.norm_a();
    let mut config = SolverConfig::for_problem(&lp);
    config.eta = spec.eta_scale / norm_a;
    config.beta = spec.beta;
    config.tau0 = spec.tau0;
    config.termination_kkt_tol = spec.kkt_tol;
    config.max_total_iters = spec.max_total_iters;
    config.record_gap_checks = false;
    let tstar = match &sharp {
        Some(r) if norm_a > 0.0 => Some(theoretical_tstar(r.alpha, config.eta, norm_a, config.beta)?),
        _ => None,
    };

    let mut results: Vec<CheckResult> = Vec::new();
    let mut csv = Vec::new();
    let mut solve_summary = None;
    if spec.runs_solver() {
        if norm_a == 0.0 {
            return Err(Error::InvalidParameter("A is zero; no step size is defined".into()));
        }
        let z0 = PrimalDualPoint::zeros(&lp);
        let dyn_oracle = oracle.as_ref().map(|o| &o.projector as &dyn DistanceOracle);
        let log = run_restarted(&lp, &z0, &config, dyn_oracle)?;
        let d0 = oracle.as_ref().map(|o| o.projector.distance(&z0));

        let mut theta_flags = None;
        let mut tstar_flags = None;
        if spec.wants(CheckKind::ThetaBall) {
            if let Some(d0) = d0 {
                let (res, flags) = checks::theta_ball(&log, d0);
                results.push(res);
                theta_flags = Some(flags);
            }
        }
        if spec.wants(CheckKind::Tstar) {
            if let Some(t) = tstar {
                let (res, flags) = checks::tstar_bound(&log, t);
                results.push(res);
                tstar_flags = Some(flags);
            }
        }
        if spec.wants(CheckKind::LinearDecay) {
            if let (Some(t), Some(d0)) = (tstar, d0) {
                results.push(checks::linear_decay(&log, config.beta, t, config.tau0, d0));
            }
        }
        csv = csv_rows(&log, theta_flags.as_deref(), tstar_flags.as_deref());
        let last = log.epochs.last().expect("a run has at least one epoch");
        solve_summary = Some(SolveSummary {
            eta: config.eta,
            beta: config.beta,
            tau0: config.tau0,
            termination: log.termination.as_str().into(),
            epochs: log.epochs.len(),
            total_iters: log.total_iters,
            total_matvecs: log.total_matvecs,
            gap_evals: log.gap_evals,
            kkt_evals: log.kkt_evals,
            matvecs_reconcile: log.matvecs_reconcile(),
            final_kkt_norm: last.kkt_norm,
            final_dist_to_opt: last.dist_to_opt,
            final_point: log.final_point.clone(),
        });
    }

    if spec.wants(CheckKind::Sharpness) {
        if let (Some(o), Some(r)) = (&oracle, &sharp) {
            let s = checks::sharpness_samples(&lp, r.alpha, radius, &o.projector, SHARPNESS_SAMPLES, spec.seed)?;
            results.push(s.sharpness);
            results.push(s.gap_lower_bound);
            results.push(checks::alpha_lower(r));
            results.push(checks::optimal_norm(&lp, &o.face));
            results.push(CheckResult::verdict(
                "sharpness_rank_one",
                r.rank_one_violations == 0,
                r.rank_one_max_ratio,
                1.0,
                format!("{} submatrices with the objective row", r.rank_one_checked),
            ));
        }
    }
    let mut guarded = |kind: CheckKind, res: Result<CheckResult>, results: &mut Vec<CheckResult>| -> Result<()> {
        match res {
            Ok(r) => results.push(r),
            Err(e) if guard_like(&e) => {
                warnings.push(format!("{} disabled: {e}", kind.name()));
                disabled.push((kind, e.to_string()));
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };
    if spec.wants(CheckKind::Hoffman) {
        guarded(CheckKind::Hoffman, checks::hoffman(&lp, HOFFMAN_SAMPLES, spec.seed), &mut results)?;
    }
    if spec.wants(CheckKind::RankOne) {
        guarded(CheckKind::RankOne, checks::rank_one(&lp, RANK_ONE_STACKS, spec.seed), &mut results)?;
    }
    if spec.wants(CheckKind::Schur) {
        guarded(CheckKind::Schur, checks::schur(SCHUR_SYSTEMS, spec.seed), &mut results)?;
    }
    if spec.wants(CheckKind::Tu) {
        guarded(CheckKind::Tu, checks::tu(&lp, TU_INVERSE_SAMPLES, spec.seed), &mut results)?;
    }
    for (kind, reason) in disabled {
        results.push(CheckResult::disabled(kind.name(), reason));
    }

    let any_fail = results.iter().any(|r| r.status == CheckStatus::Fail);
    let all_disabled = !spec.checks.is_empty() && results.iter().all(|r| r.status == CheckStatus::Disabled);
    let exit_code = if any_fail {
        EXIT_CHECK_FAILED
    } else if all_disabled {
        EXIT_GUARD
    } else {
        EXIT_PASS
    };
    let source = match &spec.source {
        InstanceSource::File(p) => p.display().to_string(),
        InstanceSource::Generator(g) => g.clone(),
    };
    Ok(ExperimentReport {
        summary: ExperimentSummary {
            instance: InstanceSummary {
                source,
                m1: lp.m1(),
                m2: lp.m2(),
                nnz: lp.a().nnz(),
                h: lp.h(),
                norm_a,
                radius,
                integral: lp.is_integral(),
            },
            solve: solve_summary,
            optimum: oracle.as_ref().map(|o| o.face.summary()),
            alpha: sharp.as_ref().map(|r| r.alpha),
            tstar,
            checks: results,
            warnings,
            exit_code,
        },
        csv_rows: csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lists() {
        assert_eq!(parse_checks("all").unwrap().len(), 8);
        assert!(parse_checks("none").unwrap().is_empty());
        assert_eq!(parse_checks("tu,schur,tu").unwrap(), vec![CheckKind::Schur, CheckKind::Tu]);
        assert!(parse_checks("tu,bogus").is_err());
    }

    #[test]
    fn beta_out_of_range() {
        let mut spec = ExperimentSpec::new(InstanceSource::Generator("lp1".into()));
        spec.beta = 1.5;
        let err = run_experiment(&spec).unwrap_err();
        assert!(err.to_string().contains("β ∈ (0,1)"));
        assert_eq!(exit_code_for(&err), EXIT_CONFIG);
    }

    #[test]
    fn lp1_all_checks_pass() {
        let mut spec = ExperimentSpec::new(InstanceSource::Generator("lp1".into()));
        spec.checks = CheckKind::ALL.to_vec();
        let rep = run_experiment(&spec).unwrap();
        let failing: Vec<_> = rep.summary.checks.iter().filter(|c| c.status != CheckStatus::Pass).collect();
        assert!(failing.is_empty(), "{failing:#?}");
        assert_eq!(rep.exit_code(), EXIT_PASS);
        assert!(!rep.csv_rows.is_empty());
    }

    #[test]
    fn generators() {
        assert_eq!(generate("triangle", 0).unwrap().m2(), 3);
        assert_eq!(generate("assignment:2", 1).unwrap().m1(), 3);
        assert_eq!(generate("flow:4:5", 1).unwrap().m1(), 3);
        assert!(generate("hexagon", 0).is_err());
        assert!(generate("flow:x:5", 0).is_err());
    }
}
