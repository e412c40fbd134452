//! Run an experiment from key=value text and print its report.
//!
//! ```bash
//! cargo run --release -p stable-graph --example run_experiment
//! ```

use stable_graph::experiments::{run, ExperimentConfig, Scale};
use stable_graph::kv::KeyValues;

fn main() -> stable_graph::Result<()> {
    let kv = KeyValues::parse("preset=critical\nalpha=1.5\nn=1000,4000,16000\nreplicas=100\nseed=3")?;
    let cfg = ExperimentConfig::from_key_values("sizes", Scale::Smoke, &kv)?;
    let report = run(&cfg)?;
    print!("{}", report.render());
    println!("all checks passed: {}", report.passed());
    Ok(())
}
