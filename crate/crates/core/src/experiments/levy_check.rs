//! Calibration of the Lévy simulators.

use super::stats::{hill_estimator, mean_se, median, ratio_of_sums};
use super::{median_se, replicate, ExperimentConfig, ExperimentReport, Metric, Table};
use crate::coding_paths::GridPath;
use crate::error::{Error, Result};
use crate::levy_sim::{levy_increment, rn_weight, simulate_l, simulate_tilted, stopped_weight_log_identity, LevyParams, TiltMethod};
use crate::row;

fn params_for(base: &LevyParams, alpha: f64) -> Result<LevyParams> {
    if alpha >= 2.0 {
        LevyParams::brownian(if base.is_brownian() { base.beta } else { 1.0 }, base.mu)
    } else {
        LevyParams::stable(alpha, if base.is_brownian() { 1.0 } else { base.c }, base.mu)
    }
}

/// Laplace exponent, mean-one weights, the tilted drift, agreement of the
/// tilted process with the weighted untilted one, the stopped-weight grid
/// gap under refinement and the tail of inverse local time.
///
/// `replicas` is the number of paths per check. Extra keys: `lambdas`,
/// `alphas`, `times`, `tilted_paths`, `gap_paths`, `ell`, `hill_h`,
/// `hill_increments`, `hill_dt`.
pub fn run_levy_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let lambdas = cfg.extra.get_list("lambdas")?.unwrap_or(vec![0.5, 1.0, 2.0]);
    let alphas = cfg.extra.get_list("alphas")?.unwrap_or(vec![1.5, 2.0]);
    let times = cfg.extra.get_list("times")?.unwrap_or(vec![0.5, 1.0]);
    let tilted_paths: usize = cfg.param("tilted_paths", 5_000, 20_000)?;
    let gap_paths: usize = cfg.param("gap_paths", 100, 100)?;
    let ell: f64 = cfg.param("ell", 0.5, 0.5)?;
    let hill_h: f64 = cfg.param("hill_h", 0.01, 0.01)?;
    let hill_n: usize = cfg.param("hill_increments", 2_000, 10_000)?;
    let hill_dt: f64 = cfg.param("hill_dt", 1e-4, 1e-4)?;
    let p = cfg.levy;
    let t = cfg.t;
    let master = cfg.master();
    let mut report = ExperimentReport::new(cfg);

    let c15 = LevyParams::stable(1.5, 1.0, 1.0)?.c_alpha();
    let oracle = 4.0 * std::f64::consts::PI.sqrt() / 3.0;
    report.push(Metric::within_abs("c_alpha_1.5", c15, None, oracle, 1e-12));

    let mut laplace = Table::new("laplace.csv", &["lambda", "empirical", "se", "psi"]);
    let lt = replicate(&master.split(0), cfg.replicas, |_, rng| Ok(levy_increment(&p, t, rng)))?;
    for &lambda in &lambdas {
        let e: Vec<f64> = lt.iter().map(|l| (-lambda * l).exp()).collect();
        let m = mean_se(&e);
        let (emp, se) = (m.value.ln() / t, m.se / m.value / t);
        report.push(Metric::within_se(format!("laplace.lambda={lambda}"), emp, se, p.psi(lambda), 3.0));
        laplace.push(row![lambda, emp, se, p.psi(lambda)]);
    }

    let t_max = times.iter().copied().fold(t, f64::max);
    let mut weighted: Option<(Vec<f64>, Vec<f64>)> = None;
    for (ai, &alpha) in alphas.iter().enumerate() {
        let q = params_for(&p, alpha)?;
        let runs = replicate(&master.split(1 + ai as u64), cfg.replicas, |_, rng| {
            let path = simulate_l(&q, t_max, cfg.dt, rng)?;
            let w = times.iter().map(|&s| rn_weight(&path, s, &q)).collect::<Result<Vec<f64>>>()?;
            Ok((w, rn_weight(&path, t, &q)?, path.at(t)))
        })?;
        for (ti, &s) in times.iter().enumerate() {
            let w: Vec<f64> = runs.iter().map(|r| r.0[ti]).collect();
            let m = mean_se(&w);
            report.push(Metric::within_se(format!("mean_weight.alpha={alpha}.t={s}"), m.value, m.se, 1.0, 3.0));
        }
        if q == p {
            weighted = Some((runs.iter().map(|r| r.1).collect(), runs.iter().map(|r| r.2).collect()));
        }
    }

    let method = if p.is_brownian() { TiltMethod::ExactBrownian } else { TiltMethod::Direct { eps_cut: None } };
    let tilted = replicate(&master.split(100), tilted_paths, |_, rng| Ok(simulate_tilted(&p, t, cfg.dt, rng, method)?.at(t)))?;
    let tm = mean_se(&tilted);
    report.push(Metric::within_se("tilted_mean", tm.value, tm.se, p.drift(t), 3.0));
    if let Some((w, l)) = weighted {
        let wl: Vec<f64> = w.iter().zip(&l).map(|(w, l)| w * l).collect();
        let wl2: Vec<f64> = w.iter().zip(&l).map(|(w, l)| w * l * l).collect();
        let m1 = ratio_of_sums(&wl, &w);
        let m2 = ratio_of_sums(&wl2, &w);
        let sq: Vec<f64> = tilted.iter().map(|v| v * v).collect();
        let d2 = mean_se(&sq);
        let se1 = (m1.se.powi(2) + tm.se.powi(2)).sqrt();
        let se2 = (m2.se.powi(2) + d2.se.powi(2)).sqrt();
        report.push(Metric::within_se("two_constructions.first_moment_gap", m1.value - tm.value, se1, 0.0, 3.0));
        report.push(Metric::within_se("two_constructions.second_moment_gap", m2.value - d2.value, se2, 0.0, 3.0));
    }

    let mut gaps = Table::new("stopped_gap.csv", &["path", "gap_coarse", "gap_fine", "ratio"]);
    let fine_dt = cfg.dt / 2.0;
    let base = master.split(200);
    let mut ratios = Vec::with_capacity(gap_paths);
    let mut attempt = 0u64;
    while ratios.len() < gap_paths {
        if attempt as usize >= 100 * gap_paths {
            return Err(Error::Budget { attempts: attempt as usize });
        }
        let mut rng = base.split(attempt);
        attempt += 1;
        let fine = simulate_l(&p, cfg.horizon, fine_dt, &mut rng)?;
        let coarse = GridPath::new(cfg.dt, fine.values.iter().step_by(2).copied().collect())?;
        let (Ok(f), Ok(c)) = (stopped_weight_log_identity(&fine, ell, &p), stopped_weight_log_identity(&coarse, ell, &p))
        else {
            continue;
        };
        let (gf, gc) = ((f.0 - f.1).abs(), (c.0 - c.1).abs());
        if gc > 0.0 {
            gaps.push(row![ratios.len(), gc, gf, gf / gc]);
            ratios.push(gf / gc);
        }
    }
    report.push(Metric::within_band("stopped_gap_ratio_median", median(&ratios), Some(median_se(&ratios)), 0.4, 0.6));

    let mut rng = master.split(300);
    let mut increments = Vec::with_capacity(hill_n);
    let (mut x, mut time, mut last) = (0.0f64, 0.0f64, 0.0f64);
    let mut steps = 0usize;
    while increments.len() < hill_n {
        if steps >= 200_000_000 {
            return Err(Error::Budget { attempts: steps });
        }
        x += levy_increment(&p, hill_dt, &mut rng);
        time += hill_dt;
        steps += 1;
        while x < -hill_h * (increments.len() + 1) as f64 && increments.len() < hill_n {
            increments.push(time - last);
            last = time;
        }
    }
    let hill = hill_estimator(&increments, hill_n / 10);
    let target = 1.0 / p.alpha;
    report.push(Metric::within_band("inverse_local_time_tail_index", hill, None, target - 0.15, target + 0.15));

    report.tables.push(laplace);
    report.tables.push(gaps);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Scale;

    #[test]
    fn small_calibration_passes() {
        let mut cfg = ExperimentConfig::new("levy-check", Scale::Smoke).unwrap();
        cfg.replicas = 4_000;
        cfg.extra = crate::kv::KeyValues::parse("tilted_paths=2000\ngap_paths=40\nhill_increments=1000").unwrap();
        let r = run_levy_check(&cfg).unwrap();
        assert!(r.passed(), "{}", r.render());
    }
}
