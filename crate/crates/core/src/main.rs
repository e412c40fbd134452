use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stable_graph::experiments::{run, ExperimentConfig, Scale};
use stable_graph::kv::KeyValues;

/// Seeded experiments on critical configuration graphs and their limits.
#[derive(Parser)]
#[command(name = "stable-graph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordered component sizes, surpluses and diameters.
    Sizes(Common),
    /// Discrete and continuum change-of-measure weights.
    Weights(Common),
    /// Back-edge counts against their compensator.
    Cox(Common),
    /// GHP distance between discrete and limit components.
    Ghp(Common),
    /// Length-conditioned excursions against tilted proxies.
    Conditioned(Common),
    /// Probability that the configuration multigraph is simple.
    SimpleProb(Common),
    /// Calibration of the Lévy simulators.
    LevyCheck(Common),
}

#[derive(Args)]
struct Common {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "smoke")]
    scale: Scale,
    /// Directory for report.csv and the CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match cli.command {
        Command::Sizes(c) => ("sizes", c),
        Command::Weights(c) => ("weights", c),
        Command::Cox(c) => ("cox", c),
        Command::Ghp(c) => ("ghp", c),
        Command::Conditioned(c) => ("conditioned", c),
        Command::SimpleProb(c) => ("simple-prob", c),
        Command::LevyCheck(c) => ("levy-check", c),
    };
    match execute(name, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(name: &str, common: Common) -> stable_graph::Result<bool> {
    let kv = match &common.config {
        Some(path) => KeyValues::parse(&std::fs::read_to_string(path)?)?,
        None => KeyValues::default(),
    };
    let mut cfg = ExperimentConfig::from_key_values(name, common.scale, &kv)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = common.out {
        cfg.out = Some(out);
    }
    let report = run(&cfg)?;
    print!("{}", report.render());
    if let Some(dir) = &cfg.out {
        report.write_to(dir)?;
    }
    Ok(report.passed())
}
