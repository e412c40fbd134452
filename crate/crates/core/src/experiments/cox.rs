//! Back-edge counts against their compensator.

use super::stats::{dispersion_index, ratio_of_sums};
use super::{replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::config_explorer::{explore, ExploreOptions};
use crate::degree_model::sample_degrees;
use crate::error::Result;
use crate::row;

struct Replica {
    count: usize,
    proxy: f64,
    exact: f64,
    bins: Vec<usize>,
}

/// Per replica, the number of back-edges in the first `⌊T n^{α/(α+1)}⌋`
/// steps against `(1/(μn)) Σ_k R(k)` and against the summed hazard.
/// Replicas without back-edges are kept with count zero.
///
/// Extra keys: `bin_width` (compensator mass per dispersion bin, default 0.5).
pub fn run_cox_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.require_critical()?;
    let width: f64 = cfg.param("bin_width", 0.5, 0.5)?;
    let alpha = cfg.law.alpha();
    let mu = cfg.law.mu();
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new("cox.csv", &["n", "replica", "count", "compensator_proxy", "compensator_exact"]);

    for (level, &n) in cfg.ns.iter().enumerate() {
        let window = (cfg.horizon * (n as f64).powf(alpha / (alpha + 1.0))).floor() as usize;
        let reps = replicate(&master.split(level as u64), cfg.replicas, |_, rng| {
            let seq = sample_degrees(&cfg.law, n, rng)?;
            let ex = explore(&seq, rng, ExploreOptions { max_steps: Some(window + 1), ..Default::default() });
            let steps = window.min(ex.trace.hazard.len());
            let proxy = ex.trace.r[..steps].iter().map(|&r| r as f64).sum::<f64>() / (mu * n as f64);
            let mut cumulative = Vec::with_capacity(steps + 1);
            let mut acc = 0.0;
            for &h in &ex.trace.hazard[..steps] {
                cumulative.push(acc);
                acc += h;
            }
            let full_bins = (acc / width).floor() as usize;
            let mut bins = vec![0usize; full_bins];
            let mut count = 0;
            for b in ex.back_edges.iter().filter(|b| b.step < steps) {
                count += 1;
                let idx = (cumulative[b.step] / width).floor() as usize;
                if idx < full_bins {
                    bins[idx] += 1;
                }
            }
            Ok(Replica { count, proxy, exact: acc, bins })
        })?;

        let counts: Vec<f64> = reps.iter().map(|r| r.count as f64).collect();
        let proxy: Vec<f64> = reps.iter().map(|r| r.proxy).collect();
        let exact: Vec<f64> = reps.iter().map(|r| r.exact).collect();
        let tag = format!("n={n}");
        let rp = ratio_of_sums(&counts, &proxy);
        report.push(Metric::within_se(format!("{tag}.ratio_proxy_compensator"), rp.value, rp.se, 1.0, 3.0));
        let re = ratio_of_sums(&counts, &exact);
        report.push(Metric::within_se(format!("{tag}.ratio_exact_compensator"), re.value, re.se, 1.0, 3.0));
        let zero = reps.iter().filter(|r| r.count == 0).count();
        report.push(Metric::info(format!("{tag}.zero_count_replicas"), zero as f64, None));
        let bins: Vec<f64> = reps.iter().flat_map(|r| r.bins.iter().map(|&b| b as f64)).collect();
        if bins.len() >= 2 {
            let d = dispersion_index(&bins);
            let se = (2.0 / (bins.len() - 1) as f64).sqrt();
            report.push(Metric::within_band(format!("{tag}.dispersion_index"), d, Some(se), 0.8, 1.2));
            report.push(Metric::info(format!("{tag}.bins"), bins.len() as f64, None));
        }
        for (i, r) in reps.iter().enumerate() {
            table.push(row![n, i, r.count, r.proxy, r.exact]);
        }
    }
    report.tables.push(table);
    Ok(report)
}
