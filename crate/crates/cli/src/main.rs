//! `ncf`: command-line driver for the numerical laboratory.
//!
//! Every subcommand writes one JSON report, to `--out` or standard output,
//! even when it fails. Exit codes: 0 all gated checks pass, 1 a check
//! failed, 2 invalid configuration, 3 numerical failure.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::{Format, RunConfig};
use ncf::report::Report;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ncf", version, about = "Riesz transforms, cocycles and Fourier multipliers on group algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// JSON config file; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional negativity of a length, with the Schoenberg cross-check.
    VerifyCn(Opts),
    /// Build a cocycle and check its identities.
    CocycleBuild(Opts),
    /// Riesz square functions and the norm ratio.
    RieszReport(Opts),
    /// Gaussian moments against conditional row/column norms.
    Khintchine(Opts),
    /// Littlewood-Paley g-function of the length semigroup.
    Gfunction(Opts),
    /// Dyadic Sobolev condition on a Euclidean symbol.
    SobolevB1(Opts),
    /// Continuous-scale Sobolev condition on a Euclidean symbol.
    SobolevB2(Opts),
    /// Limiting length and the weighted Besov condition on the line.
    BesovT28(Opts),
    /// Poisson carré du champ and the small-p failure.
    MeyerPoisson(Opts),
    /// Constants of fractional lengths.
    FractionalKn(Opts),
    /// Branch Littlewood-Paley family on a free ball.
    BranchLp(Opts),
    /// Branch Hörmander-Mikhlin condition and h_t vectors.
    BranchHm(Opts),
    /// Write the cocycle vectors and action.
    DumpCocycle(Opts),
}

impl Command {
    fn split(self) -> (&'static str, Opts) {
        match self {
            Command::VerifyCn(o) => ("verify-cn", o),
            Command::CocycleBuild(o) => ("cocycle-build", o),
            Command::RieszReport(o) => ("riesz-report", o),
            Command::Khintchine(o) => ("khintchine", o),
            Command::Gfunction(o) => ("gfunction", o),
            Command::SobolevB1(o) => ("sobolev-b1", o),
            Command::SobolevB2(o) => ("sobolev-b2", o),
            Command::BesovT28(o) => ("besov-t28", o),
            Command::MeyerPoisson(o) => ("meyer-poisson", o),
            Command::FractionalKn(o) => ("fractional-kn", o),
            Command::BranchLp(o) => ("branch-lp", o),
            Command::BranchHm(o) => ("branch-hm", o),
            Command::DumpCocycle(o) => ("dump-cocycle", o),
        }
    }
}

fn load_config(opts: &Opts) -> Result<RunConfig, String> {
    match &opts.config {
        None => Ok(opts.run.clone()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            opts.run.overlay(&v)
        }
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), String> {
    let csv = cfg.format.unwrap_or_default() == Format::JsonCsv;
    match &cfg.out {
        Some(path) => report.write(path, csv).map(|_| ()).map_err(|e| e.to_string()),
        None if csv => Err("--format json+csv needs --out".into()),
        None => {
            println!("{}", report.to_json().map_err(|e| e.to_string())?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    ncf::par::init_from_env();
    let (name, opts) = Cli::parse().command.split();
    let (cfg, mut code) = match load_config(&opts) {
        Ok(c) => (c, None),
        Err(e) => (opts.run.clone(), Some((2, format!("invalid configuration: {e}")))),
    };
    let mut report = Report::new(name, serde_json::to_value(&cfg).unwrap_or_default());
    if code.is_none() {
        if let Err(f) = commands::run(name, &cfg, &mut report) {
            let c = match &f {
                commands::Failure::Core(e) if e.is_numerical() => 3,
                _ => 2,
            };
            code = Some((c, f.to_string()));
        }
    }
    if let Some((_, msg)) = &code {
        report.error = Some(msg.clone());
        eprintln!("ncf {name}: {msg}");
    }
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("ncf {name}: {e}");
        return ExitCode::from(2);
    }
    match code {
        Some((c, _)) => ExitCode::from(c),
        None if report.passed() => ExitCode::SUCCESS,
        None => {
            for c in report.failed_checks() {
                eprintln!("ncf {name}: check {} failed (value {})", c.name, c.value);
            }
            ExitCode::from(1)
        }
    }
}
