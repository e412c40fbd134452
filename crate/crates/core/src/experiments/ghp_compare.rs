//! Largest discrete components against limit components of matched mass
//! and surplus.

use super::stats::{mean_se, median};
use super::{median_se, replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::config_explorer::{explore, ExploreOptions};
use crate::continuum_graph::{ghp_estimate, graph_component_to_mms, sample_limit_component, ProxyConfig};
use crate::degree_model::sample_degrees;
use crate::error::{Error, Result};
use crate::row;

struct Pair {
    mass: f64,
    surplus: usize,
    ghp: f64,
    exact: bool,
    diam_discrete: f64,
    diam_limit: f64,
    self_distance: f64,
}

/// Extra keys: `points` (points per space), `proxy_n`, `batch`, `ess_floor`
/// and `budget` (heuristic coupling evaluations).
pub fn run_ghp_compare(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.require_critical()?;
    let points: usize = cfg.param("points", 48, 96)?;
    let mut proxy = ProxyConfig::new(cfg.law.clone(), cfg.param("proxy_n", 200, 1_000)?);
    proxy.batch = cfg.param("batch", 64, 256)?;
    proxy.ess_floor = cfg.param("ess_floor", 5.0, 10.0)?;
    proxy.max_points = points;
    let budget: usize = cfg.param("budget", 2_000, 20_000)?;
    let alpha = cfg.law.alpha();
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new(
        "ghp.csv",
        &["n", "replica", "mass", "surplus", "ghp", "exact", "diameter_discrete", "diameter_limit"],
    );
    let mut medians = Vec::new();

    for (level, &n) in cfg.ns.iter().enumerate() {
        let reps = replicate(&master.split(level as u64), cfg.replicas, |_, rng| {
            let seq = sample_degrees(&cfg.law, n, rng)?;
            let ex = explore(&seq, rng, ExploreOptions { record_edges: true, ..Default::default() });
            let big = ex.components.iter().max_by(|a, b| a.size.cmp(&b.size).then(b.id.cmp(&a.id))).expect("non-empty graph");
            let edges = ex.component_edges(big).expect("edges recorded");
            let discrete = graph_component_to_mms(ex.component_vertices(big), edges, n, alpha, Some(points), rng)?;
            let mass = big.size as f64 * (n as f64).powf(-alpha / (alpha + 1.0));
            let limit = match sample_limit_component(mass, big.surplus, &proxy, rng) {
                Ok(l) => l,
                Err(Error::Resampling { .. } | Error::Budget { .. }) => return Ok(Err((mass, big.surplus))),
                Err(e) => return Err(e),
            };
            let g = ghp_estimate(&discrete, &limit.space, budget)?;
            let self_distance = ghp_estimate(&discrete, &discrete, budget)?.value;
            Ok(Ok(Pair {
                mass,
                surplus: big.surplus,
                ghp: g.value,
                exact: g.exact,
                diam_discrete: discrete.diameter(),
                diam_limit: limit.space.diameter(),
                self_distance,
            }))
        })?;

        let failed: Vec<(f64, usize)> = reps.iter().filter_map(|r| r.as_ref().err().copied()).collect();
        if 2 * failed.len() > reps.len() {
            let worst = failed.iter().map(|f| f.1).max().unwrap_or(0);
            return Err(Error::Matching(format!(
                "{} of {} limit components could not be matched at n={n} (largest surplus {worst})",
                failed.len(),
                reps.len()
            )));
        }
        let pairs: Vec<&Pair> = reps.iter().filter_map(|r| r.as_ref().ok()).collect();
        let tag = format!("n={n}");
        report.push(Metric::info(format!("{tag}.matching_failures"), failed.len() as f64, None));
        let ghp: Vec<f64> = pairs.iter().map(|p| p.ghp).collect();
        let med = median(&ghp);
        medians.push(med);
        report.push(Metric::info(format!("{tag}.ghp_median"), med, Some(median_se(&ghp))));
        let e = mean_se(&ghp);
        report.push(Metric::info(format!("{tag}.ghp_mean"), e.value, Some(e.se)));
        let dd: Vec<f64> = pairs.iter().map(|p| p.diam_discrete).collect();
        let dl: Vec<f64> = pairs.iter().map(|p| p.diam_limit).collect();
        report.push(Metric::info(format!("{tag}.diameter_discrete_median"), median(&dd), Some(median_se(&dd))));
        report.push(Metric::info(format!("{tag}.diameter_limit_median"), median(&dl), Some(median_se(&dl))));
        let self_max = pairs.iter().map(|p| p.self_distance).fold(0.0, f64::max);
        report.push(Metric::within_abs(format!("{tag}.self_distance_max"), self_max, None, 0.0, 1e-12));
        for (i, r) in reps.iter().enumerate() {
            match r {
                Ok(p) => table.push(row![n, i, p.mass, p.surplus, p.ghp, p.exact, p.diam_discrete, p.diam_limit]),
                Err((mass, m)) => table.push(row![n, i, mass, m, "", "", "", ""]),
            }
        }
    }
    if medians.len() >= 2 {
        let trend = medians[medians.len() - 1] <= medians[medians.len() - 2];
        report.push(Metric::info("ghp_median_decreases", f64::from(u8::from(trend)), None));
    }
    report.tables.push(table);
    Ok(report)
}
