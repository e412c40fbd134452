//! Seeded, configuration-driven experiments.
//!
//! Every experiment reads an [`ExperimentConfig`], derives one child stream
//! per replica from the master seed, and returns an [`ExperimentReport`]:
//! metric rows `name,value,se,tol,pass` plus CSV tables. Output bytes depend
//! only on the configuration and the seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::degree_model::{make_critical_power_law, DegreeLaw};
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::levy_sim::LevyParams;
use crate::rng::Stream;

mod conditioned;
mod cox;
mod ghp_compare;
mod levy_check;
mod simple_prob;
mod sizes;
pub mod stats;
mod weights;

pub use conditioned::{conditioned_area_dp, run_conditioned_component};
pub use cox::run_cox_check;
pub use ghp_compare::run_ghp_compare;
pub use levy_check::run_levy_check;
pub use simple_prob::run_simple_prob;
pub use sizes::run_component_size_experiment;
pub use weights::run_weight_convergence;

/// Experiment names accepted by [`run`] and the CLI.
pub const EXPERIMENTS: [&str; 7] = ["sizes", "weights", "cox", "ghp", "conditioned", "simple-prob", "levy-check"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Seconds.
    Smoke,
    /// Minutes; the sizes used for the published claims.
    Paper,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Scale::Smoke),
            "paper" => Ok(Scale::Paper),
            _ => Err(Error::Validation(format!("unknown scale {s:?}"))),
        }
    }
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Smoke => "smoke",
            Scale::Paper => "paper",
        }
    }

    fn pick<T>(self, smoke: T, paper: T) -> T {
        match self {
            Scale::Smoke => smoke,
            Scale::Paper => paper,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub scale: Scale,
    pub law: DegreeLaw,
    /// Continuum parameters matched to `law` unless overridden by `levy.*` keys.
    pub levy: LevyParams,
    pub ns: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub dt: f64,
    /// Horizon `T` for continuum paths and for the exploration window.
    pub horizon: f64,
    /// Time `t` at which weights are evaluated.
    pub t: f64,
    pub out: Option<PathBuf>,
    /// Experiment-specific keys.
    pub extra: KeyValues,
}

/// Continuum parameters matching a degree law.
pub fn matched_levy(law: &DegreeLaw) -> Result<LevyParams> {
    if law.is_finite() {
        LevyParams::brownian(law.beta(), law.mu())
    } else {
        LevyParams::stable(law.alpha(), law.c(), law.mu())
    }
}

impl ExperimentConfig {
    /// Defaults for experiment `name` at `scale`.
    pub fn new(name: &str, scale: Scale) -> Result<Self> {
        if !EXPERIMENTS.contains(&name) {
            return Err(Error::Validation(format!("unknown experiment {name:?}")));
        }
        let law = match name {
            "simple-prob" => DegreeLaw::finite(&[(1, 0.75), (3, 0.25)])?,
            _ => make_critical_power_law(1.5, 3)?,
        };
        let (ns, replicas): (Vec<usize>, usize) = match name {
            "sizes" => scale.pick((vec![1_000, 3_000, 10_000], 100), (vec![10_000, 30_000, 100_000], 300)),
            "weights" => scale.pick((vec![1_000, 10_000], 400), (vec![10_000, 100_000], 2_000)),
            "cox" => scale.pick((vec![10_000], 100), (vec![100_000], 500)),
            "ghp" => scale.pick((vec![1_000, 10_000], 8), (vec![10_000, 100_000], 40)),
            "conditioned" => scale.pick((vec![10_000], 300), (vec![10_000, 100_000], 2_000)),
            "simple-prob" => scale.pick((vec![10_000], 2_000), (vec![10_000], 5_000)),
            _ => scale.pick((vec![], 20_000), (vec![], 100_000)),
        };
        Ok(Self {
            name: name.to_string(),
            scale,
            levy: matched_levy(&law)?,
            law,
            ns,
            replicas,
            seed: 1,
            dt: 1.0 / 256.0,
            horizon: 2.0,
            t: 1.0,
            out: None,
            extra: KeyValues::default(),
        })
    }

    /// Defaults overridden by a `key=value` block. Law keys (`preset`,
    /// `alpha`, `k0`, `atom.<k>`, `tail.A`) replace the law; `levy.*` keys
    /// override the matched continuum parameters.
    pub fn from_key_values(name: &str, scale: Scale, kv: &KeyValues) -> Result<Self> {
        let mut cfg = Self::new(name, scale)?;
        if kv.contains("preset") || kv.with_prefix("atom.").next().is_some() {
            cfg.law = DegreeLaw::from_key_values(kv)?;
            cfg.levy = matched_levy(&cfg.law)?;
        }
        let levy_keys = ["levy.alpha", "levy.c", "levy.beta", "levy.mu"];
        if levy_keys.iter().any(|k| kv.contains(k)) {
            let alpha = kv.get_or("levy.alpha", cfg.levy.alpha)?;
            let mu = kv.get_or("levy.mu", cfg.levy.mu)?;
            cfg.levy = if alpha >= 2.0 {
                LevyParams::brownian(kv.get_or("levy.beta", cfg.levy.beta)?, mu)?
            } else {
                LevyParams::stable(alpha, kv.get_or("levy.c", cfg.levy.c)?, mu)?
            };
        }
        if let Some(ns) = kv.get_list("n")? {
            cfg.ns = ns;
        }
        cfg.replicas = kv.get_or("replicas", cfg.replicas)?;
        cfg.seed = kv.get_or("seed", cfg.seed)?;
        cfg.dt = kv.get_or("dt", cfg.dt)?;
        cfg.horizon = kv.get_or("T", cfg.horizon)?;
        cfg.t = kv.get_or("t", cfg.t)?;
        if let Some(out) = kv.raw("out") {
            cfg.out = Some(PathBuf::from(out));
        }
        cfg.extra = kv.clone();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Validation("replicas must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.horizon > 0.0 && self.t >= 0.0) {
            return Err(Error::Validation("dt and T must be positive, t non-negative".into()));
        }
        if self.ns.contains(&0) {
            return Err(Error::Validation("graph sizes must be positive".into()));
        }
        Ok(())
    }

    /// Experiment-specific value with a scale-dependent default.
    pub fn param<T: FromStr>(&self, key: &str, smoke: T, paper: T) -> Result<T> {
        self.extra.get_or(key, self.scale.pick(smoke, paper))
    }

    pub(crate) fn require_critical(&self) -> Result<()> {
        if (self.law.theta() - 1.0).abs() > 1e-8 {
            return Err(Error::Precondition(format!("law is not critical: theta={}", self.law.theta())));
        }
        Ok(())
    }

    pub(crate) fn master(&self) -> Stream {
        Stream::new(self.seed)
    }

    fn header(&self) -> String {
        format!("# experiment={} seed={} scale={}\n", self.name, self.seed, self.scale.as_str())
    }
}

/// One report row. `se = None` marks an exact quantity; `pass = None` an
/// informational row.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub se: Option<f64>,
    pub tol: String,
    pub pass: Option<bool>,
}

impl Metric {
    pub fn info(name: impl Into<String>, value: f64, se: Option<f64>) -> Self {
        Self { name: name.into(), value, se, tol: "-".into(), pass: None }
    }

    /// `|value - target| ≤ k·se`.
    pub fn within_se(name: impl Into<String>, value: f64, se: f64, target: f64, k: f64) -> Self {
        let pass = (value - target).abs() <= k * se;
        Self { name: name.into(), value, se: Some(se), tol: format!("{k}se of {target}"), pass: Some(pass) }
    }

    /// `|value - target| ≤ tol`.
    pub fn within_abs(name: impl Into<String>, value: f64, se: Option<f64>, target: f64, tol: f64) -> Self {
        let pass = (value - target).abs() <= tol;
        Self { name: name.into(), value, se, tol: format!("{tol} of {target}"), pass: Some(pass) }
    }

    /// `lo ≤ value ≤ hi`.
    pub fn within_band(name: impl Into<String>, value: f64, se: Option<f64>, lo: f64, hi: f64) -> Self {
        let pass = (lo..=hi).contains(&value);
        Self { name: name.into(), value, se, tol: format!("[{lo};{hi}]"), pass: Some(pass) }
    }
}

/// A CSV artifact of an experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Self { file: file.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, header: &str) -> String {
        let mut s = String::from(header);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Row builder for [`Table::push`].
#[macro_export]
#[doc(hidden)]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: String,
    header: String,
    pub metrics: Vec<Metric>,
    pub tables: Vec<Table>,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self { experiment: cfg.name.clone(), header: cfg.header(), metrics: Vec::new(), tables: Vec::new() }
    }

    /// Adds a row, prefixing its name with the experiment name.
    pub fn push(&mut self, mut m: Metric) {
        m.name = format!("{}.{}", self.experiment, m.name);
        self.metrics.push(m);
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        let full = format!("{}.{name}", self.experiment);
        self.metrics.iter().find(|m| m.name == full)
    }

    /// True when no checked row failed.
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.pass != Some(false))
    }

    /// `report.csv` contents.
    pub fn render(&self) -> String {
        let mut s = self.header.clone();
        s.push_str("name,value,se,tol,pass\n");
        for m in &self.metrics {
            let se = m.se.map_or("exact".to_string(), |v| v.to_string());
            let pass = m.pass.map_or("-".to_string(), |p| p.to_string());
            let _ = writeln!(s, "{},{},{se},{},{pass}", m.name, m.value, m.tol);
        }
        s
    }

    /// Writes `report.csv` and every table into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.render())?;
        for t in &self.tables {
            std::fs::write(dir.join(&t.file), t.render(&self.header))?;
        }
        Ok(())
    }
}

/// Runs experiment `cfg.name`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.name.as_str() {
        "sizes" => run_component_size_experiment(cfg),
        "weights" => run_weight_convergence(cfg),
        "cox" => run_cox_check(cfg),
        "ghp" => run_ghp_compare(cfg),
        "conditioned" => run_conditioned_component(cfg),
        "simple-prob" => run_simple_prob(cfg),
        "levy-check" => run_levy_check(cfg),
        other => Err(Error::Validation(format!("unknown experiment {other:?}"))),
    }
}

/// Evaluates `f(i, stream_i)` for `i < count` across worker threads, where
/// `stream_i = base.split(i)`. Results come back in index order.
pub fn replicate<T, F>(base: &Stream, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut Stream) -> Result<T> + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(count.max(1));
    if workers <= 1 {
        return (0..count).map(|i| f(i, &mut base.split(i as u64))).collect();
    }
    let chunks: Vec<Result<Vec<(usize, T)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    (w..count).step_by(workers).map(|i| f(i, &mut base.split(i as u64)).map(|v| (i, v))).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut all = Vec::with_capacity(count);
    for c in chunks {
        all.extend(c?);
    }
    all.sort_by_key(|p| p.0);
    Ok(all.into_iter().map(|p| p.1).collect())
}

/// Standard error of a sample median from the order statistics at
/// `1/2 ± 1/(2√N)`.
pub(crate) fn median_se(xs: &[f64]) -> f64 {
    let h = 0.5 / (xs.len() as f64).sqrt();
    (stats::quantile(xs, 0.5 + h) - stats::quantile(xs, 0.5 - h)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_replicas_is_rejected() {
        let kv = KeyValues::parse("replicas=0").unwrap();
        assert!(matches!(ExperimentConfig::from_key_values("sizes", Scale::Smoke, &kv), Err(Error::Validation(_))));
        assert!(ExperimentConfig::new("nope", Scale::Smoke).is_err());
    }

    #[test]
    fn config_overrides() {
        let kv = KeyValues::parse("preset=critical\nalpha=1.7\nn=50,60\nlevy.mu=1.5\nseed=9").unwrap();
        let cfg = ExperimentConfig::from_key_values("sizes", Scale::Smoke, &kv).unwrap();
        assert_eq!(cfg.law.alpha(), 1.7);
        assert_eq!(cfg.levy.alpha, 1.7);
        assert_eq!(cfg.levy.mu, 1.5);
        assert_eq!(cfg.ns, vec![50, 60]);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn replicate_is_order_stable() {
        use rand::Rng;
        let base = Stream::new(4);
        let a = replicate(&base, 37, |i, r| Ok((i, r.random::<u64>()))).unwrap();
        let b: Vec<_> = (0..37).map(|i| (i, base.split(i as u64).random::<u64>())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn report_rows() {
        let cfg = ExperimentConfig::new("cox", Scale::Smoke).unwrap();
        let mut r = ExperimentReport::new(&cfg);
        r.push(Metric::within_se("ratio", 1.01, 0.01, 1.0, 3.0));
        r.push(Metric::info("count", 3.0, None));
        assert!(r.passed());
        assert_eq!(
            r.render(),
            "# experiment=cox seed=1 scale=smoke\nname,value,se,tol,pass\ncox.ratio,1.01,0.01,3se of 1,true\ncox.count,3,exact,-,-\n"
        );
    }
}
