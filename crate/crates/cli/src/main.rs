use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use rpdhg::harness::{
    exit_code_for, parse_checks, run_experiment, ExperimentSpec, InstanceSource, OutputFormat, EXIT_CONFIG,
};

/// Restarted PDHG solves and certification checks on small linear programs.
#[derive(Debug, Parser)]
#[command(name = "rpdhg", version)]
#[command(group(ArgGroup::new("source").required(true).args(["instance", "generator"])))]
struct Cli {
    /// Instance file (`m1 m2 nnz`, triplets, b, c).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// lp1, triangle, path3, flow:N:ARCS, assignment:N, or a generator config file.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step size as a fraction of 1/||A||_2.
    #[arg(long, default_value_t = 0.5)]
    eta_scale: f64,
    #[arg(long, default_value_t = (-1.0f64).exp())]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    tau0: usize,
    #[arg(long, default_value_t = 1e-9)]
    kkt_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: u64,
    /// Comma-separated: theta_ball, tstar, linear_decay, sharpness, hoffman,
    /// rank_one, schur, tu; or `all` / `none`.
    #[arg(long, default_value = "none")]
    checks: String,
    /// Skip the solve when only static checks are wanted.
    #[arg(long)]
    no_solve: bool,
    /// Directory for convergence.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, default_value = "csv")]
    format: String,
}

fn build_spec(cli: &Cli) -> rpdhg::Result<ExperimentSpec> {
    let source = match (&cli.instance, &cli.generator) {
        (Some(p), _) => InstanceSource::File(p.clone()),
        (None, Some(g)) => InstanceSource::Generator(g.clone()),
        (None, None) => unreachable!("clap requires a source"),
    };
    let mut spec = ExperimentSpec::new(source);
    spec.seed = cli.seed;
    spec.eta_scale = cli.eta_scale;
    spec.beta = cli.beta;
    spec.tau0 = cli.tau0;
    spec.kkt_tol = cli.kkt_tol;
    spec.max_total_iters = cli.max_iters;
    spec.checks = parse_checks(&cli.checks)?;
    spec.solve = !cli.no_solve;
    spec.out_dir = cli.out.clone();
    spec.format = cli.format.parse::<OutputFormat>()?;
    Ok(spec)
}

fn run(cli: &Cli) -> rpdhg::Result<i32> {
    let spec = build_spec(cli)?;
    let report = run_experiment(&spec)?;
    if let Some(dir) = &spec.out_dir {
        report.write_to(dir)?;
    }
    for w in &report.summary.warnings {
        eprintln!("warning: {w}");
    }
    for c in &report.summary.checks {
        eprintln!("{:<22} {:?}  {}", c.name, c.status, c.detail);
    }
    print!("{}", report.render(spec.format)?);
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
