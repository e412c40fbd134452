//! Ordered component sizes, surpluses and diameters across `n`.

use super::stats::{ks_two_sample, mean_se, median, ols_slope};
use super::{median_se, replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::config_explorer::{explore, ExploreOptions};
use crate::degree_model::sample_degrees;
use crate::error::Result;
use crate::row;

const TOP: usize = 5;

struct Replica {
    /// `(size, surplus, first vertex index)` of the largest components.
    top: Vec<(usize, usize, usize)>,
    diameter: Option<usize>,
}

/// Largest components of the critical configuration model at each `n`.
///
/// Extra keys: `diameter` (default true).
pub fn run_component_size_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.require_critical()?;
    let with_diameter: bool = cfg.param("diameter", true, true)?;
    let alpha = cfg.law.alpha();
    let size_exp = alpha / (alpha + 1.0);
    let diam_exp = (alpha - 1.0) / (alpha + 1.0);
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut components = Table::new("components.csv", &["n", "replica", "rank", "size", "scaled_size", "surplus", "scaled_start"]);
    let mut largest = Table::new("largest.csv", &["n", "replica", "size", "surplus", "diameter"]);
    let mut scaled_levels: Vec<Vec<f64>> = Vec::new();
    let (mut log_n, mut log_size, mut log_diam) = (Vec::new(), Vec::new(), Vec::new());

    for (level, &n) in cfg.ns.iter().enumerate() {
        let base = master.split(level as u64);
        let reps = replicate(&base, cfg.replicas, |_, rng| {
            let seq = sample_degrees(&cfg.law, n, rng)?;
            let ex = explore(&seq, rng, ExploreOptions { record_edges: with_diameter, ..Default::default() });
            let mut comps: Vec<_> = ex.components.iter().collect();
            comps.sort_by(|a, b| b.size.cmp(&a.size).then(a.id.cmp(&b.id)));
            let diameter = match (with_diameter, comps.first()) {
                (true, Some(c)) => Some(ex.component_diameter(c)?),
                _ => None,
            };
            let top = comps.iter().take(TOP).map(|c| (c.size, c.surplus, c.vertices.start)).collect();
            Ok(Replica { top, diameter })
        })?;

        let scale = (n as f64).powf(-size_exp);
        for (i, r) in reps.iter().enumerate() {
            for (rank, &(size, surplus, start)) in r.top.iter().enumerate() {
                components.push(row![n, i, rank + 1, size, size as f64 * scale, surplus, start as f64 * scale]);
            }
            let (size, surplus, _) = r.top[0];
            largest.push(row![n, i, size, surplus, r.diameter.map_or(String::new(), |d| d.to_string())]);
        }
        let sizes: Vec<f64> = reps.iter().map(|r| r.top[0].0 as f64).collect();
        let scaled: Vec<f64> = sizes.iter().map(|s| s * scale).collect();
        let surplus: Vec<f64> = reps.iter().map(|r| r.top[0].1 as f64).collect();
        let tag = format!("n={n}");
        let med = median(&scaled);
        report.push(Metric::within_band(format!("{tag}.largest_scaled_median"), med, Some(median_se(&scaled)), 0.05, 50.0));
        let m = mean_se(&scaled);
        report.push(Metric::info(format!("{tag}.largest_scaled_mean"), m.value, Some(m.se)));
        for rank in 1..TOP {
            let v: Vec<f64> = reps.iter().filter_map(|r| r.top.get(rank)).map(|t| t.0 as f64 * scale).collect();
            if !v.is_empty() {
                let e = mean_se(&v);
                report.push(Metric::info(format!("{tag}.rank{}_scaled_mean", rank + 1), e.value, Some(e.se)));
            }
        }
        let s = mean_se(&surplus);
        report.push(Metric::info(format!("{tag}.largest_surplus_mean"), s.value, Some(s.se)));
        log_n.push((n as f64).ln());
        log_size.push(median(&sizes).ln());
        if with_diameter {
            let d: Vec<f64> = reps.iter().filter_map(|r| r.diameter).map(|d| d as f64).collect();
            let md = median(&d);
            report.push(Metric::info(format!("{tag}.diameter_median"), md, Some(median_se(&d))));
            log_diam.push(md.ln());
        }
        if let Some(prev) = scaled_levels.last() {
            let ks = ks_two_sample(prev, &scaled);
            let k = (prev.len() * scaled.len()) as f64 / (prev.len() + scaled.len()) as f64;
            report.push(Metric::info(format!("ks_largest.{}_{n}", cfg.ns[level - 1]), ks, Some(1.0 / k.sqrt())));
        }
        scaled_levels.push(scaled);
    }

    if log_n.len() >= 2 {
        let s = ols_slope(&log_n, &log_size);
        report.push(Metric::within_abs("slope_largest_size", s.value, Some(s.se), size_exp, 0.1));
        if with_diameter {
            let d = ols_slope(&log_n, &log_diam);
            report.push(Metric::within_abs("slope_diameter", d.value, Some(d.se), diam_exp, 0.12));
        }
    }
    report.tables.push(components);
    report.tables.push(largest);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::DegreeLaw;
    use crate::error::Error;
    use crate::experiments::Scale;

    fn small(law: DegreeLaw) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new("sizes", Scale::Smoke).unwrap();
        cfg.law = law;
        cfg.ns = vec![2_000, 4_000];
        cfg.replicas = 20;
        cfg
    }

    #[test]
    fn deterministic_and_nondegenerate() {
        let cfg = small(DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap());
        let a = run_component_size_experiment(&cfg).unwrap();
        let b = run_component_size_experiment(&cfg).unwrap();
        assert_eq!(a.render(), b.render());
        assert_eq!(a.tables, b.tables);
        assert_eq!(a.metric("n=2000.largest_scaled_median").unwrap().pass, Some(true));
        assert_eq!(a.tables[0].columns.join(","), "n,replica,rank,size,scaled_size,surplus,scaled_start");
    }

    #[test]
    fn rejects_subcritical_law() {
        let cfg = small(DegreeLaw::finite(&[(1, 0.8), (2, 0.2)]).unwrap());
        assert!(matches!(run_component_size_experiment(&cfg), Err(Error::Precondition(_))));
    }
}
