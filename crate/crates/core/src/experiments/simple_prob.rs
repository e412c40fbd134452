//! Probability that the configuration multigraph is simple.

use super::stats::mean_se;
use super::{replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::config_explorer::{is_simple, pair_half_edges};
use crate::degree_model::sample_degrees;
use crate::error::Result;
use crate::row;

/// Fraction of simple pairings against `exp(-θ/2 - θ²/4)`, one fresh degree
/// sequence per attempt.
///
/// Extra keys: `tol` (absolute tolerance, default 0.02).
pub fn run_simple_prob(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let tol: f64 = cfg.param("tol", 0.02, 0.02)?;
    let theta = cfg.law.theta();
    let target = (-theta / 2.0 - theta * theta / 4.0).exp();
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new("simple.csv", &["n", "attempts", "simple", "rate"]);
    for (level, &n) in cfg.ns.iter().enumerate() {
        let hits = replicate(&master.split(level as u64), cfg.replicas, |_, rng| {
            let seq = sample_degrees(&cfg.law, n, rng)?;
            Ok(if is_simple(&pair_half_edges(&seq, rng)?) { 1.0 } else { 0.0 })
        })?;
        let e = mean_se(&hits);
        report.push(Metric::within_abs(format!("n={n}.simple_rate"), e.value, Some(e.se), target, tol));
        table.push(row![n, cfg.replicas, hits.iter().sum::<f64>(), e.value]);
    }
    report.tables.push(table);
    Ok(report)
}
