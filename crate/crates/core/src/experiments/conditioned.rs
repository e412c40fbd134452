//! Forest excursions conditioned on their length against tilted proxies.

use super::stats::{mean_se, ratio_of_sums, Estimate};
use super::{replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::coding_paths::lattice_excursions;
use crate::config_explorer::forest_walk;
use crate::continuum_graph::{feasible_proxy_size, proxy_excursion};
use crate::degree_model::{sample_degrees, size_biased_law, size_biased_reorder, DegreeLaw};
use crate::error::{arg, Error, Result};
use crate::row;

/// Mean of `A = Σ_{j<m} W_j` under `e^{tilt·A}`, for the walk `W` with
/// i.i.d. steps `Z - 2` (`Z` size-biased from `law`) started at 0 and
/// conditioned to stay non-negative for `m` steps and end at `-1`.
pub fn conditioned_area_dp(law: &DegreeLaw, m: usize, tilt: f64) -> Result<f64> {
    let pmf = size_biased_law(law);
    let top = pmf.max_support().ok_or_else(|| Error::Mode("exact conditioning needs finite support".into()))?;
    if m == 0 {
        return Err(arg("excursion length must be positive"));
    }
    let steps: Vec<(i64, f64)> =
        (1..=top).map(|z| (z as i64 - 2, pmf.prob(z))).filter(|&(_, p)| p > 0.0).collect();
    let width = m * top + 2;
    // f: weighted mass, g: weighted first moment of the area, indexed by level.
    let mut f = vec![0.0; width];
    let mut g = vec![0.0; width];
    f[0] = 1.0;
    let mut end = (0.0, 0.0);
    for j in 0..m {
        let (mut nf, mut ng) = (vec![0.0; width], vec![0.0; width]);
        for w in 0..width {
            if f[w] == 0.0 {
                continue;
            }
            let e = (tilt * w as f64).exp();
            let (fw, gw) = (f[w] * e, (g[w] + w as f64 * f[w]) * e);
            for &(s, p) in &steps {
                let next = w as i64 + s;
                if j + 1 == m {
                    if next == -1 {
                        end.0 += fw * p;
                        end.1 += gw * p;
                    }
                } else if next >= 0 {
                    nf[next as usize] += fw * p;
                    ng[next as usize] += gw * p;
                }
            }
        }
        f = nf;
        g = ng;
    }
    if end.0 <= 0.0 {
        return Err(Error::Infeasible(format!("no excursion of length {m} under this law")));
    }
    Ok(end.1 / end.0)
}

/// Excursions of `S̃` with length in `[m, m(1+δ)]`, `m = ⌊x n^{α/(α+1)}⌋`,
/// started before `t_max n^{α/(α+1)}`. Areas are scaled by `1/n` and normalised
/// to mass `x` by `(x/ℓ)^{1+1/α}`, then compared with proxy excursions of
/// mass `x` tilted by `exp(x^{1+1/α} ∫e / μ)`.
///
/// Extra keys: `x` (default 0.5), `t_max` (default 4), `delta` (default 0.5 / 0.2), `proxy_n`,
/// `proxy_samples`, `min_accept` (accepted excursions per replica below
/// which the run fails, default 0.05), `dp_m` (length for the exact
/// small-`m` row on finite laws, default 13).
pub fn run_conditioned_component(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.require_critical()?;
    let x: f64 = cfg.param("x", 0.5, 0.5)?;
    let t_max: f64 = cfg.param("t_max", 4.0, 4.0)?;
    let delta: f64 = cfg.param("delta", 0.5, 0.2)?;
    let proxy_n = feasible_proxy_size(&cfg.law, cfg.param("proxy_n", 300, 500)?);
    let proxy_samples: usize = cfg.param("proxy_samples", 1_000, 10_000)?;
    let min_accept: f64 = cfg.param("min_accept", 0.05, 0.05)?;
    if !(x > 0.0 && delta >= 0.0) {
        return Err(Error::Validation("x must be positive and delta non-negative".into()));
    }
    let alpha = cfg.law.alpha();
    let mu = cfg.law.mu();
    let expo = 1.0 + 1.0 / alpha;
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new("conditioned.csv", &["source", "replica", "length", "area"]);
    let mut last: Option<Estimate> = None;

    for (level, &n) in cfg.ns.iter().enumerate() {
        let scale = (n as f64).powf(alpha / (alpha + 1.0));
        let lo = ((x * scale).floor() as usize).max(1);
        let hi = (lo as f64 * (1.0 + delta)).floor() as usize;
        let window = (t_max * scale).floor() as usize;
        let reps = replicate(&master.split(level as u64), cfg.replicas, |_, rng| {
            let seq = size_biased_reorder(&sample_degrees(&cfg.law, n, rng)?, rng);
            let walk = forest_walk(seq.degrees());
            let mut found = Vec::new();
            for e in lattice_excursions(&walk)? {
                if e.start >= window {
                    break;
                }
                if e.complete && (lo..=hi).contains(&e.len()) {
                    let ell = e.len() as f64 / scale;
                    found.push((ell, e.excursion.area() / n as f64 * (x / ell).powf(expo)));
                }
            }
            Ok(found)
        })?;
        let accepted: Vec<(usize, f64, f64)> =
            reps.iter().enumerate().flat_map(|(i, v)| v.iter().map(move |&(l, a)| (i, l, a))).collect();
        if (accepted.len() as f64) < min_accept * cfg.replicas as f64 || accepted.len() < 2 {
            return Err(Error::Budget { attempts: cfg.replicas });
        }
        let areas: Vec<f64> = accepted.iter().map(|a| a.2).collect();
        let tag = format!("n={n}");
        let e = mean_se(&areas);
        report.push(Metric::info(format!("{tag}.mean_area"), e.value, Some(e.se)));
        let var = e.se * e.se * areas.len() as f64;
        report.push(Metric::info(format!("{tag}.var_area"), var, None));
        report.push(Metric::info(format!("{tag}.accepted"), areas.len() as f64, None));
        let mass_dev = accepted.iter().map(|a| (a.1 * (x / a.1) - x).abs()).fold(0.0, f64::max);
        report.push(Metric::within_abs(format!("{tag}.mass_deviation"), mass_dev, None, 0.0, 1e-12));
        for &(i, l, a) in &accepted {
            table.push(row![tag, i, l, a]);
        }
        last = Some(e);
    }

    let sampler = size_biased_law(&cfg.law).sampler();
    let proxies = replicate(&master.split(u64::MAX), proxy_samples, |_, rng| {
        let p = proxy_excursion(&sampler, alpha, proxy_n, 1_000_000, rng)?;
        Ok(x.powf(expo) * p.e.area())
    })?;
    let top = proxies.iter().fold(f64::NEG_INFINITY, |m, a| m.max(a / mu));
    let w: Vec<f64> = proxies.iter().map(|a| (a / mu - top).exp()).collect();
    let wa: Vec<f64> = proxies.iter().zip(&w).map(|(a, w)| a * w).collect();
    let wa2: Vec<f64> = proxies.iter().zip(&w).map(|(a, w)| a * a * w).collect();
    let tilted = ratio_of_sums(&wa, &w);
    let second = ratio_of_sums(&wa2, &w);
    report.push(Metric::info("proxy.mean_area_tilted", tilted.value, Some(tilted.se)));
    report.push(Metric::info("proxy.var_area_tilted", second.value - tilted.value.powi(2), None));
    let plain = mean_se(&proxies);
    report.push(Metric::info("proxy.mean_area_untilted", plain.value, Some(plain.se)));
    let ess = w.iter().sum::<f64>().powi(2) / w.iter().map(|v| v * v).sum::<f64>();
    report.push(Metric::info("proxy.ess", ess, None));
    if let Some(d) = last {
        let se = (d.se * d.se + tilted.se * tilted.se).sqrt();
        report.push(Metric::within_se("mean_area_vs_tilted_proxy", d.value - tilted.value, se, 0.0, 3.0));
    }
    for (i, a) in proxies.iter().enumerate() {
        table.push(row!["proxy", i, x, a]);
    }

    if cfg.law.is_finite() {
        let m: usize = cfg.param("dp_m", 13, 13)?;
        match conditioned_area_dp(&cfg.law, m, 0.0) {
            Ok(v) => report.push(Metric::info(format!("dp.mean_area_m={m}"), v, None)),
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
    }
    report.tables.push(table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Scale;

    /// Exhaustive sum over all step sequences of length `m`.
    fn enumerate(law: &DegreeLaw, m: usize, tilt: f64) -> f64 {
        let pmf = size_biased_law(law);
        let steps: Vec<(i64, f64)> =
            (1..=pmf.max_support().unwrap()).map(|z| (z as i64 - 2, pmf.prob(z))).filter(|s| s.1 > 0.0).collect();
        let (mut num, mut den) = (0.0, 0.0);
        let total = steps.len().pow(m as u32);
        for code in 0..total {
            let (mut c, mut w, mut area, mut p, mut ok) = (code, 0i64, 0.0, 1.0, true);
            for j in 0..m {
                let (s, q) = steps[c % steps.len()];
                c /= steps.len();
                area += w as f64;
                p *= q;
                w += s;
                if j + 1 < m && w < 0 {
                    ok = false;
                    break;
                }
            }
            if ok && w == -1 {
                let wt = p * (tilt * area).exp();
                num += area * wt;
                den += wt;
            }
        }
        num / den
    }

    #[test]
    fn dp_matches_enumeration() {
        let law = DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap();
        for m in [1, 3, 5, 9, 13, 17] {
            for tilt in [0.0, 0.05] {
                let dp = conditioned_area_dp(&law, m, tilt).unwrap();
                let en = enumerate(&law, m, tilt);
                assert!((dp - en).abs() <= 1e-10 * en.max(1.0), "m={m} tilt={tilt}: {dp} vs {en}");
            }
        }
        let skewed = DegreeLaw::finite(&[(1, 0.6), (2, 0.1), (4, 0.3)]).unwrap();
        for m in [2, 6, 10] {
            let dp = conditioned_area_dp(&skewed, m, 0.02).unwrap();
            assert!((dp - enumerate(&skewed, m, 0.02)).abs() <= 1e-10 * dp.max(1.0));
        }
        assert!(matches!(conditioned_area_dp(&law, 2, 0.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn smoke_run_is_deterministic() {
        let mut cfg = ExperimentConfig::new("conditioned", Scale::Smoke).unwrap();
        cfg.law = DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap();
        cfg.ns = vec![2_000];
        cfg.replicas = 60;
        cfg.extra = crate::kv::KeyValues::parse("proxy_samples=300\nproxy_n=100").unwrap();
        let a = run_conditioned_component(&cfg).unwrap();
        let b = run_conditioned_component(&cfg).unwrap();
        assert_eq!(a.render(), b.render());
        assert_eq!(a.metric("n=2000.mass_deviation").unwrap().pass, Some(true));
        assert!(a.metric("dp.mean_area_m=13").is_some());
    }
}
