//! Command-line front end for the experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use awplab::experiments::{emit_report, run_with_threads, ExperimentSpec, Kind, SeedRange};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "awplab", version, about = "Run a configured experiment and write its report")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Longest low-average exploration witness against ln^3 n.
    Theorem1(Common),
    /// Block exploration spine length against n e^{-pi/sqrt(2 beta)}.
    Theorem2(Common),
    /// Front of the N-selection walk after t ln^3 N generations.
    NbrwSpeed(Common),
    /// Corridor confinement rate scaled by delta^2.
    Mogulskii(Common),
    /// Exploration witnesses against the exhaustive oracle.
    OracleCompare(Common),
    /// Full audit battery.
    Audits(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; the shipped default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed range `a..b`, overriding the config.
    #[arg(long)]
    seeds: Option<SeedRange>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Theorem1(c) => (Kind::Theorem1, c),
        Command::Theorem2(c) => (Kind::Theorem2, c),
        Command::NbrwSpeed(c) => (Kind::NbrwSpeed, c),
        Command::Mogulskii(c) => (Kind::Mogulskii, c),
        Command::OracleCompare(c) => (Kind::OracleCompare, c),
        Command::Audits(c) => (Kind::Audits, c),
    };
    match execute(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(kind: Kind, c: Common) -> awplab::Result<bool> {
    let mut spec = match &c.config {
        Some(path) => ExperimentSpec::from_path(path)?,
        None => ExperimentSpec::default_for(kind),
    };
    if spec.kind != kind {
        return Err(awplab::Error::Config(format!("config is for {}, not {kind}", spec.kind)));
    }
    if let Some(seeds) = c.seeds {
        spec.seeds = seeds;
    }
    if let Some(out) = c.out {
        spec.out = Some(out);
    }
    let result = run_with_threads(&spec, c.threads)?;
    let dir = spec.out.clone().unwrap_or_else(|| PathBuf::from("out").join(kind.as_str()));
    for path in emit_report(&result, &dir)? {
        println!("wrote {}", path.display());
    }
    for check in &result.checks {
        let seed = check.seed.map(|s| format!(" (seed {s})")).unwrap_or_default();
        println!("{} {}: {}{seed}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    Ok(result.passed())
}
