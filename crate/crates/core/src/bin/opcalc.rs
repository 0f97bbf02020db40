//! Command-line driver: apply the calculus to user-supplied functions and
//! operators, or run the named verification experiments. Reports land as
//! JSON (plus CSV tables) under the output directory; the exit code is 0
//! iff every check passed.

use clap::{Parser, Subcommand};
use opcalc::experiments::{self, ExperimentConfig, FunctionSpec, Report};
use opcalc::quad::QuadratureSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "opcalc",
    about = "smooth functional calculus for non-commuting matrices with real spectra",
    version
)]
struct Cli {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// random seed (overrides the config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory for reports and CSV tables
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// scale factor applied to every check tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON file with a quadrature layout override
    #[arg(long, global = true)]
    quad: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// compute f(P) (or f(P_1, ..., P_m) for tensor functions)
    Apply {
        /// function spec JSON: {"kind": "smooth"|"pole"|"tensor", ...}
        #[arg(long)]
        function: PathBuf,
        /// operator JSON: one matrix, or an array of matrices for tuples
        #[arg(long)]
        operator: PathBuf,
        /// use the truncated-Taylor extension instead of the Fourier one
        #[arg(long)]
        taylor: bool,
        /// evaluate pole terms through the resolvent instead of quadrature
        #[arg(long)]
        exact_poles: bool,
        /// where to write the result JSON (stdout when omitted)
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// scalar, eigen-oracle, extension-independence and algebra checks
    OracleSuite,
    /// the rotated-projector pair: support blow-up under perturbation
    Perturb,
    /// ||f(P,Q) - f(Q,P)|| against the commutator norm
    Commutator,
    /// line calculus vs the circle series through the Cayley transform
    Cayley,
    /// generator recovery from the calculus homomorphism; pole calculus
    Recover,
    /// the composition law g(f(P)) = (g o f)(P)
    Compose,
    /// heatmaps of ||f_{a,b}(P_1, P_2)|| against the joint spectrum
    SupportScan,
    /// decay slopes, Cauchy-Green identity, convergence and honesty checks
    Convergence,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, opcalc::Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.tol.is_some() {
        cfg.tol_scale = cli.tol;
    }
    if let Some(qpath) = &cli.quad {
        let text = std::fs::read_to_string(qpath)?;
        cfg.quad = Some(serde_json::from_str::<QuadratureSpec>(&text)?);
    }
    Ok(cfg)
}

fn finish(report: Report, cfg: &ExperimentConfig) -> Result<bool, opcalc::Error> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let path = dir.join(format!("{}.report.json", report.experiment));
    report.write_json(&path)?;
    report.print_summary();
    println!("report: {}", path.display());
    Ok(report.passed)
}

fn run() -> Result<bool, opcalc::Error> {
    let cli = Cli::parse();
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Apply {
            function,
            operator,
            taylor,
            exact_poles,
            result,
        } => {
            let spec: FunctionSpec = experiments::load_function(function)?;
            let mats = experiments::load_operators(operator)?;
            let out = experiments::run_apply(&spec, mats, *taylor, *exact_poles, cfg.quad)?;
            let text = serde_json::to_string_pretty(&out)?;
            match result {
                Some(path) => {
                    if let Some(dir) = path.parent() {
                        std::fs::create_dir_all(dir)?;
                    }
                    std::fs::write(path, text)?;
                }
                None => println!("{text}"),
            }
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            Ok(true)
        }
        Command::OracleSuite => finish(experiments::run_oracle_suite(&cfg)?, &cfg),
        Command::Perturb => finish(experiments::run_perturbation(&cfg)?, &cfg),
        Command::Commutator => finish(experiments::run_commutator_bound(&cfg)?, &cfg),
        Command::Cayley => finish(experiments::run_cayley_check(&cfg)?, &cfg),
        Command::Recover => finish(experiments::run_recovery(&cfg)?, &cfg),
        Command::Compose => finish(experiments::run_composition(&cfg)?, &cfg),
        Command::SupportScan => finish(experiments::run_support_scan(&cfg)?, &cfg),
        Command::Convergence => finish(experiments::run_convergence(&cfg)?, &cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
