//! Limit components through discrete proxies.
//!
//! A proxy excursion is the Łukasiewicz walk of a tree with size-biased
//! offspring `Z - 1`, conditioned on `N` vertices by rejection and turned into
//! an excursion by a cyclic shift. It supplies both the excursion `e` and the
//! height function `h`. The surplus tilt `(∫e)^m` is applied by importance
//! resampling over a batch of proposals.

use rand::Rng;

use super::{identify_pairs, rtree_from_excursion, FiniteMms};
use crate::coding_paths::{height_from_walk, Interpolation, MarkedExcursion};
use crate::degree_model::{size_biased_law, DegreeLaw, Sampler};
use crate::error::{arg, Error, Result};

#[derive(Clone, Debug)]
pub struct ProxyConfig {
    pub law: DegreeLaw,
    /// Vertices in each proxy tree.
    pub proxy_n: usize,
    /// Proposals per importance-resampling round.
    pub batch: usize,
    /// Points kept in the output space, mark endpoints included.
    pub max_points: usize,
    pub ess_floor: f64,
    /// Rejection attempts allowed per proxy tree.
    pub max_tries: usize,
}

impl ProxyConfig {
    /// `proxy_n` is rounded up by [`feasible_proxy_size`].
    pub fn new(law: DegreeLaw, proxy_n: usize) -> Self {
        let proxy_n = feasible_proxy_size(&law, proxy_n);
        Self { law, proxy_n, batch: 512, max_points: 512, ess_floor: 10.0, max_tries: 1_000_000 }
    }
}

/// Smallest `N ≥ n` for which the walk with steps `Z - 2` can sit at `-1`
/// after `N` steps: `N - 1` must be a multiple of the span of `Z - 1`.
pub fn feasible_proxy_size(law: &DegreeLaw, n: usize) -> usize {
    let pmf = size_biased_law(law);
    if pmf.tail().is_some() {
        return n.max(1);
    }
    let span = pmf.atoms().iter().filter(|a| a.1 > 0.0).fold(0usize, |g, a| gcd(g, a.0 - 1));
    if span <= 1 {
        return n.max(1);
    }
    let n = n.max(1);
    n + (span - (n - 1) % span) % span
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug)]
pub struct ProxyExcursion {
    /// Shifted walk, `N + 1` values ending at `-1`.
    pub walk: Vec<i64>,
    /// `N^{-1/α}` times the walk on `[0, 1]`, closed at zero.
    pub e: MarkedExcursion,
    /// `N^{-(α-1)/α}` times the height process on `[0, 1]`.
    pub h: MarkedExcursion,
}

/// Walk with steps `Z - 2`, conditioned to end at `-1` after `n` steps and
/// cyclically shifted to stay non-negative before its last step.
pub fn proxy_excursion<R: Rng + ?Sized>(
    sampler: &Sampler,
    alpha: f64,
    n: usize,
    max_tries: usize,
    rng: &mut R,
) -> Result<ProxyExcursion> {
    if n == 0 {
        return Err(arg("proxy size must be positive"));
    }
    let mut steps = vec![0i64; n];
    for _ in 0..max_tries {
        let mut sum = 0i64;
        for s in steps.iter_mut() {
            *s = sampler.sample(rng) as i64 - 2;
            sum += *s;
        }
        if sum != -1 {
            continue;
        }
        let mut walk = vec![0i64; n + 1];
        for i in 0..n {
            walk[i + 1] = walk[i] + steps[i];
        }
        let low = *walk.iter().min().unwrap();
        let r = walk.iter().position(|&v| v == low).unwrap() % n;
        let mut shifted = vec![0i64; n + 1];
        for i in 0..n {
            shifted[i + 1] = shifted[i] + steps[(r + i) % n];
        }
        let nf = n as f64;
        let dt = 1.0 / nf;
        let e_scale = nf.powf(-1.0 / alpha);
        let mut e: Vec<f64> = shifted[..n].iter().map(|&v| v as f64 * e_scale).collect();
        e.push(0.0);
        let h_scale = nf.powf(-(alpha - 1.0) / alpha);
        let mut h: Vec<f64> = height_from_walk(&shifted)?.into_iter().map(|g| g as f64 * h_scale).collect();
        h.push(0.0);
        return Ok(ProxyExcursion {
            walk: shifted,
            e: MarkedExcursion::new(e, dt, Interpolation::Step)?,
            h: MarkedExcursion::new(h, dt, Interpolation::Linear)?,
        });
    }
    Err(Error::Budget { attempts: max_tries })
}

/// Draw a point uniformly from the area under a step excursion.
fn uniform_under<R: Rng + ?Sized>(e: &MarkedExcursion, area: f64, rng: &mut R) -> (f64, f64) {
    let v = e.values();
    let dt = e.dt();
    let mut target = rng.random::<f64>() * area / dt;
    let mut cell = v.len() - 2;
    for (i, &x) in v[..v.len() - 1].iter().enumerate() {
        if target < x {
            cell = i;
            break;
        }
        target -= x;
    }
    while v[cell] <= 0.0 {
        cell -= 1;
    }
    ((cell as f64 + rng.random::<f64>()) * dt, v[cell] * rng.random::<f64>())
}

/// Quotient of the tree coded by `h` over the marks of `e`, with distances
/// multiplied by `x^{(α-1)/α}` and total mass `x`. Returns the space and the
/// identified point pairs (indices before the quotient).
pub fn build_limit_space(
    e: &MarkedExcursion,
    h: &MarkedExcursion,
    x: f64,
    alpha: f64,
    max_points: usize,
) -> Result<(FiniteMms, Vec<(usize, usize)>)> {
    if !(x > 0.0) {
        return Err(arg("mass must be positive"));
    }
    let zeta = h.zeta();
    let grid = max_points.saturating_sub(2 * e.marks.len()).max(2);
    let mut times: Vec<f64> = (0..grid).map(|i| zeta * i as f64 / (grid - 1) as f64).collect();
    let mut pairs = Vec::with_capacity(e.marks.len());
    for m in &e.marks {
        pairs.push((times.len(), times.len() + 1));
        times.push(m.s);
        times.push(m.t);
    }
    let tree = rtree_from_excursion(h, &times)?;
    let total = tree.total_mass();
    let quotient = identify_pairs(&tree, &pairs)?;
    let mass_factor = if total > 0.0 { x / total } else { 0.0 };
    Ok((quotient.scaled(x.powf((alpha - 1.0) / alpha), mass_factor), pairs))
}

#[derive(Clone, Debug)]
pub struct LimitComponent {
    pub space: FiniteMms,
    /// The resampled excursion with its marks and their close times.
    pub excursion: MarkedExcursion,
    pub height: MarkedExcursion,
    pub pairs: Vec<(usize, usize)>,
    pub ess: f64,
}

/// Proxy for a limit component of mass `x` and surplus `m`.
pub fn sample_limit_component<R: Rng + ?Sized>(
    x: f64,
    m: usize,
    cfg: &ProxyConfig,
    rng: &mut R,
) -> Result<LimitComponent> {
    if cfg.batch == 0 {
        return Err(arg("batch must be positive"));
    }
    let alpha = cfg.law.alpha();
    let sampler = size_biased_law(&cfg.law).sampler();
    let mut proposals = Vec::with_capacity(cfg.batch);
    let mut log_w = Vec::with_capacity(cfg.batch);
    for _ in 0..cfg.batch {
        let p = proxy_excursion(&sampler, alpha, cfg.proxy_n, cfg.max_tries, rng)?;
        log_w.push(m as f64 * p.e.area().ln());
        proposals.push(p);
    }
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let (s1, s2): (f64, f64) = w.iter().fold((0.0, 0.0), |(a, b), &v| (a + v, b + v * v));
    let ess = s1 * s1 / s2;
    if !(ess >= cfg.ess_floor) {
        return Err(Error::Resampling { ess, floor: cfg.ess_floor });
    }
    let mut u = rng.random::<f64>() * s1;
    let mut pick = w.len() - 1;
    for (i, &v) in w.iter().enumerate() {
        if u < v {
            pick = i;
            break;
        }
        u -= v;
    }
    let ProxyExcursion { mut e, h, .. } = proposals.swap_remove(pick);
    let area = e.area();
    for _ in 0..m {
        let (s, level) = uniform_under(&e, area, rng);
        e.add_mark(s, level)?;
    }
    let (space, pairs) = build_limit_space(&e, &h, x, alpha, cfg.max_points)?;
    Ok(LimitComponent { space, excursion: e, height: h, pairs, ess })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::make_critical_power_law;
    use crate::rng::Stream;

    fn cfg() -> ProxyConfig {
        let mut c = ProxyConfig::new(make_critical_power_law(1.5, 3).unwrap(), 200);
        c.batch = 32;
        c.max_points = 64;
        c
    }

    #[test]
    fn proxy_is_an_excursion() {
        let c = cfg();
        let sampler = size_biased_law(&c.law).sampler();
        let mut rng = Stream::new(3);
        for _ in 0..20 {
            let p = proxy_excursion(&sampler, 1.5, 200, c.max_tries, &mut rng).unwrap();
            assert_eq!(*p.walk.last().unwrap(), -1);
            assert!(p.walk[..200].iter().all(|&v| v >= 0));
            assert_eq!(p.e.values().len(), 201);
            assert!((p.e.zeta() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn proxy_sizes_respect_the_lattice() {
        let law = DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap();
        assert_eq!(feasible_proxy_size(&law, 100), 101);
        assert_eq!(feasible_proxy_size(&law, 101), 101);
        assert_eq!(feasible_proxy_size(&make_critical_power_law(1.5, 3).unwrap(), 100), 100);
        let sampler = size_biased_law(&law).sampler();
        assert!(proxy_excursion(&sampler, 2.0, 101, 10_000, &mut Stream::new(1)).is_ok());
    }

    #[test]
    fn tree_without_surplus() {
        let mut rng = Stream::new(4);
        let lc = sample_limit_component(1.0, 0, &cfg(), &mut rng).unwrap();
        assert!(lc.pairs.is_empty());
        assert!((lc.space.total_mass() - 1.0).abs() < 1e-9);
        assert_eq!(lc.ess, 32.0);
    }

    #[test]
    fn marks_close_where_expected() {
        let mut rng = Stream::new(5);
        for _ in 0..5 {
            let lc = sample_limit_component(1.0, 1, &cfg(), &mut rng).unwrap();
            let mk = lc.excursion.marks[0];
            assert_eq!(mk.t, lc.excursion.close_time(mk.s, mk.x).unwrap());
            assert!(mk.x <= lc.excursion.value_at(mk.s) && mk.s <= mk.t);
            assert_eq!(lc.pairs.len(), 1);
        }
    }

    #[test]
    fn mass_scaling_is_exact() {
        let mut rng = Stream::new(6);
        let lc = sample_limit_component(1.0, 2, &cfg(), &mut rng).unwrap();
        let (one, _) = build_limit_space(&lc.excursion, &lc.height, 1.0, 1.5, 64).unwrap();
        let (two, _) = build_limit_space(&lc.excursion, &lc.height, 2.0, 1.5, 64).unwrap();
        let f = 2f64.powf(0.5 / 1.5);
        for i in 0..one.len() {
            for j in 0..one.len() {
                assert!((two.d(i, j) - f * one.d(i, j)).abs() < 1e-12);
            }
        }
        assert!((two.total_mass() - 2.0).abs() < 1e-9);
    }
}
