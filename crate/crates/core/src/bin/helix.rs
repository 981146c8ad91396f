use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use helix::config::{parse_sigma_list, Experiment, ExperimentConfig};
use helix::experiments::{run_experiment, RunContext};

#[derive(Parser)]
#[command(name = "helix", about = "Helical and planar Navier-Stokes/Euler experiments on the unit disk")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Viscous helical solutions against the planar limit over a sigma sweep
    NsConverge(Common),
    /// Inviscid vortex runs against the planar limit
    EulerConverge(Common),
    /// Energy balance of one viscous helical run
    EnergyAudit(Common),
    /// Discrete operator identities and manufactured-solution orders
    OperatorCheck(Common),
    /// 3D lift scalings and invariance
    LiftCheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file layered over the experiment defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "helix-out")]
    out: PathBuf,
    /// Worker threads (falls back to HELIX_JOBS, then all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated sigma values replacing the configured sweep
    #[arg(long)]
    sigma: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, c) = match cli.cmd {
        Cmd::NsConverge(c) => (Experiment::NsConverge, c),
        Cmd::EulerConverge(c) => (Experiment::EulerConverge, c),
        Cmd::EnergyAudit(c) => (Experiment::EnergyAudit, c),
        Cmd::OperatorCheck(c) => (Experiment::OperatorCheck, c),
        Cmd::LiftCheck(c) => (Experiment::LiftCheck, c),
    };
    match execute(exp, c) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(exp: Experiment, c: Common) -> helix::Result<bool> {
    let mut cfg = ExperimentConfig::load(exp, c.config.as_deref())?;
    if let Some(s) = &c.sigma {
        cfg.sweep.sigmas = parse_sigma_list(s)?;
    }
    let jobs = match c.jobs {
        Some(n) => Some(n),
        None => std::env::var("HELIX_JOBS").ok().and_then(|v| v.parse().ok()),
    };
    let ctx = RunContext {
        out_dir: c.out,
        jobs,
    };
    let outcome = run_experiment(exp, &cfg, &ctx)?;
    println!("{exp}");
    for check in &outcome.checks {
        println!("  {check}");
    }
    for f in &outcome.files {
        println!("  wrote {}", f.display());
    }
    println!("{}", if outcome.pass() { "PASS" } else { "FAIL" });
    Ok(outcome.pass())
}
