use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kenergy_lab::config::{BackendKind, RunConfig};
use kenergy_lab::suites::{self, Artifacts, Suite};
use kenergy_lab::{Format, LabError, Report};

#[derive(Parser)]
#[command(name = "kenergy", version, about = "Numerical checks for scalar curvature coupled to a B-field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// dHYM flow (torus) or fiberwise solution (projective line).
    Dhym(Common),
    /// ε-regularized geodesic (torus-n1) or trivial geodesics (cp1).
    Geodesic(Common),
    /// Functional table on seeded potentials and a descent run.
    Kenergy(Common),
    /// Futaki invariant on the projective line.
    Futaki(Common),
    /// Surface system, Hessian operator and Monge-Ampère solve (torus-n2).
    Surface(Common),
    /// Class inequality and second variation at the reference.
    Stability(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    gamma_abs: Option<f64>,
    #[arg(long)]
    theta_hat: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration cap of the solvers; the explicit dHYM flow needs about 40·m² steps.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Report destination; auxiliary files are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, LabError> {
        let mut cfg = match (&self.config, self.backend) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(b)) => RunConfig::for_backend(b),
            (None, None) => RunConfig::default(),
        };
        if let (Some(b), Some(_)) = (self.backend, &self.config) {
            cfg.backend = b;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(g) = self.gamma_abs {
            cfg.gamma_abs = g;
        }
        if self.theta_hat.is_some() {
            cfg.theta_hat = self.theta_hat;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.max_iters {
            cfg.solver.max_iters = n;
        }
        if self.out.is_some() {
            cfg.out.clone_from(&self.out);
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<Report, LabError> {
    let (cfg, report) = match &cli.command {
        Command::Verify { suite, common } => {
            let suite: Suite = suite.parse()?;
            let cfg = common.resolve()?;
            let report = suites::run_suite(&cfg, suite)?;
            (cfg, report)
        }
        Command::Dhym(c) => with_artifacts(c, suites::run_dhym)?,
        Command::Geodesic(c) => with_artifacts(c, suites::run_geodesic)?,
        Command::Kenergy(c) => with_artifacts(c, suites::run_kenergy)?,
        Command::Futaki(c) => plain(c, suites::run_futaki)?,
        Command::Surface(c) => plain(c, suites::run_surface)?,
        Command::Stability(c) => plain(c, suites::run_stability)?,
    };
    match &cfg.out {
        Some(path) => report.export(path, cfg.format)?,
        None => std::io::stdout().write_all(report.render(cfg.format)?.as_bytes())?,
    }
    Ok(report)
}

fn with_artifacts(
    common: &Common,
    f: fn(&RunConfig, &Artifacts) -> Result<Report, LabError>,
) -> Result<(RunConfig, Report), LabError> {
    let cfg = common.resolve()?;
    let report = f(&cfg, &Artifacts::beside(cfg.out.as_deref()))?;
    Ok((cfg, report))
}

fn plain(common: &Common, f: fn(&RunConfig) -> Result<Report, LabError>) -> Result<(RunConfig, Report), LabError> {
    let cfg = common.resolve()?;
    let report = f(&cfg)?;
    Ok((cfg, report))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => ExitCode::from(report.exit_code() as u8),
        Err(e) => {
            eprintln!("kenergy: {e}");
            ExitCode::from(2)
        }
    }
}
