//! Discrete change-of-measure weights against the continuum weight.

use super::stats::{ks_two_sample, mean_se};
use super::{replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::degree_model::{phi_weight, size_biased_law, PhiMode};
use crate::error::{Error, Result};
use crate::levy_sim::{rn_weight, simulate_l};
use crate::row;

/// `Φ(n, ⌊t n^{α/(α+1)}⌋)` under i.i.d. size-biased degrees at each `n`,
/// and `Φ(t)` over Lévy paths.
///
/// Extra keys: `phi_draws` (draws of `Ξ` per replica, default 2) and
/// `paths` (continuum paths, default `replicas`).
pub fn run_weight_convergence(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.law.is_finite() {
        return Err(Error::Precondition("weights need a power-tail law".into()));
    }
    let draws: usize = cfg.param("phi_draws", 2, 2)?;
    let paths: usize = cfg.param("paths", cfg.replicas, cfg.replicas)?;
    let alpha = cfg.law.alpha();
    let sampler = size_biased_law(&cfg.law).sampler();
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new("weights.csv", &["source", "replica", "weight"]);
    let mut samples: Vec<(String, Vec<f64>)> = Vec::new();

    for (level, &n) in cfg.ns.iter().enumerate() {
        let m = ((cfg.t * (n as f64).powf(alpha / (alpha + 1.0))).floor() as usize).min(n);
        let w = replicate(&master.split(level as u64), cfg.replicas, |_, rng| {
            let k: Vec<usize> = (0..m).map(|_| sampler.sample(rng)).collect();
            Ok(phi_weight(n, &k, &cfg.law, PhiMode::MonteCarlo { draws }, rng)?.value)
        })?;
        let e = mean_se(&w);
        report.push(Metric::within_se(format!("n={n}.mean_weight"), e.value, e.se, 1.0, 3.0));
        samples.push((format!("n={n}"), w));
    }
    let phi = replicate(&master.split(u64::MAX), paths, |_, rng| {
        let path = simulate_l(&cfg.levy, cfg.t, cfg.dt, rng)?;
        rn_weight(&path, cfg.t, &cfg.levy)
    })?;
    let e = mean_se(&phi);
    report.push(Metric::within_se("continuum.mean_weight", e.value, e.se, 1.0, 3.0));
    samples.push(("continuum".into(), phi));

    let ks: Vec<f64> = samples.windows(2).map(|p| ks_two_sample(&p[0].1, &p[1].1)).collect();
    for (p, &d) in samples.windows(2).zip(&ks) {
        let k = (p[0].1.len() * p[1].1.len()) as f64 / (p[0].1.len() + p[1].1.len()) as f64;
        report.push(Metric::info(format!("ks.{}_{}", p[0].0, p[1].0), d, Some(1.0 / k.sqrt())));
    }
    if ks.len() >= 2 {
        let trend = ks[ks.len() - 2] >= ks[ks.len() - 1];
        report.push(Metric::info("ks_trend_holds", f64::from(u8::from(trend)), None));
    }

    let mut rng = master.split(u64::MAX - 1);
    let n0 = cfg.ns.first().copied().unwrap_or(1);
    let discrete0 = phi_weight(n0, &[], &cfg.law, PhiMode::MonteCarlo { draws: 2 }, &mut rng)?.value;
    let continuum0 = rn_weight(&simulate_l(&cfg.levy, cfg.dt, cfg.dt, &mut rng)?, 0.0, &cfg.levy)?;
    let dev = (discrete0 - 1.0).abs().max((continuum0 - 1.0).abs());
    report.push(Metric::within_abs("t0.max_abs_deviation", dev, None, 0.0, 1e-12));

    for (source, w) in &samples {
        for (i, v) in w.iter().enumerate() {
            table.push(row![source, i, v]);
        }
    }
    report.tables.push(table);
    Ok(report)
}
