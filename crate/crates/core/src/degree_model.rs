//! Degree laws, i.i.d. degree sequences, size-biased reordering and the
//! discrete change-of-measure weight φ.
//!
//! A law is a finite table of atoms, optionally followed by a power tail
//! `ν_k = A·k^{-(α+2)}` for `k ≥ k0`. Moments of the tail are evaluated with a
//! Hurwitz zeta function, so criticality `θ = 1` can be imposed exactly.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{arg, Error, Result};
use crate::kv::KeyValues;

const MASS_TOL: f64 = 1e-12;

/// Default cap on `n - m` for exact evaluation of φ.
pub const EXACT_PHI_CAP: usize = 12;

/// Hurwitz zeta `Σ_{k≥0} (k+a)^{-s}` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    const N: usize = 24;
    const B2: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut sum: f64 = (0..N).map(|k| (a + k as f64).powf(-s)).sum();
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising = s (s+1) ... (s+2j-2), fact = (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in B2.iter().enumerate() {
        if j > 0 {
            let r = 2.0 * j as f64;
            rising *= (s + r - 1.0) * (s + r);
            fact *= (r + 1.0) * (r + 2.0);
            xpow /= x * x;
        }
        sum += b / fact * rising * xpow;
    }
    sum
}

/// Power tail `amp · k^{-exponent}` for `k ≥ k0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerTail {
    pub k0: usize,
    pub amp: f64,
    pub exponent: f64,
}

impl PowerTail {
    /// `Σ_{k≥k0} k^j · amp · k^{-exponent}`, infinite when divergent.
    fn power_sum(&self, j: i32) -> f64 {
        if self.amp == 0.0 {
            return 0.0;
        }
        let s = self.exponent - j as f64;
        if s <= 1.0 {
            f64::INFINITY
        } else {
            self.amp * hurwitz_zeta(s, self.k0 as f64)
        }
    }
}

/// Probability mass function on the positive integers.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    head: Vec<f64>,
    tail: Option<PowerTail>,
}

impl Pmf {
    /// Table of atoms `(k, ν_k)`; repeated `k` accumulate.
    pub fn from_atoms(atoms: &[(usize, f64)]) -> Self {
        let len = atoms.iter().map(|a| a.0 + 1).max().unwrap_or(1);
        let mut head = vec![0.0; len];
        for &(k, p) in atoms {
            head[k] += p;
        }
        Self { head, tail: None }
    }

    pub fn with_tail(atoms: &[(usize, f64)], tail: PowerTail) -> Self {
        let mut pmf = Self::from_atoms(atoms);
        pmf.head.resize(pmf.head.len().max(tail.k0), 0.0);
        pmf.tail = Some(tail);
        pmf
    }

    pub fn prob(&self, k: usize) -> f64 {
        match &self.tail {
            Some(t) if k >= t.k0 => t.amp * (k as f64).powf(-t.exponent) + self.head.get(k).copied().unwrap_or(0.0),
            _ => self.head.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn tail(&self) -> Option<&PowerTail> {
        self.tail.as_ref()
    }

    /// Non-zero atoms of the finite table, in increasing order.
    pub fn atoms(&self) -> Vec<(usize, f64)> {
        self.head.iter().enumerate().filter(|(_, &p)| p != 0.0).map(|(k, &p)| (k, p)).collect()
    }

    /// Largest support point, `None` when a tail is present.
    pub fn max_support(&self) -> Option<usize> {
        match self.tail {
            Some(ref t) if t.amp > 0.0 => None,
            _ => self.head.iter().rposition(|&p| p > 0.0),
        }
    }

    /// `Σ_k k^j ν_k`.
    pub fn power_sum(&self, j: i32) -> f64 {
        let head: f64 = self.head.iter().enumerate().map(|(k, &p)| (k as f64).powi(j) * p).sum();
        head + self.tail.as_ref().map_or(0.0, |t| t.power_sum(j))
    }

    pub fn total(&self) -> f64 {
        self.power_sum(0)
    }

    pub fn mean(&self) -> f64 {
        self.power_sum(1)
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self)
    }

    fn tail_mass_above(&self, k: usize) -> f64 {
        match &self.tail {
            Some(t) if t.amp > 0.0 => t.amp * hurwitz_zeta(t.exponent, (k + 1).max(t.k0) as f64),
            _ => 0.0,
        }
    }
}

/// Inverse-transform sampler: a cumulative table, then an exact rejection
/// step against the continuous Pareto envelope for the power tail.
#[derive(Clone, Debug)]
pub struct Sampler {
    cdf: Vec<f64>,
    tail: Option<(usize, f64)>,
}

impl Sampler {
    fn new(pmf: &Pmf) -> Self {
        let table_end = match &pmf.tail {
            Some(t) if t.amp > 0.0 => t.k0.max(1024),
            _ => pmf.head.len() - 1,
        };
        let mut cdf = Vec::with_capacity(table_end + 1);
        let mut acc = 0.0;
        for k in 0..=table_end {
            acc += pmf.prob(k);
            cdf.push(acc);
        }
        let tail = pmf.tail.as_ref().filter(|t| t.amp > 0.0).map(|t| (table_end, t.exponent));
        if let Some((end, _)) = tail {
            let total = acc + pmf.tail_mass_above(end);
            for c in cdf.iter_mut() {
                *c /= total;
            }
        } else {
            for c in cdf.iter_mut() {
                *c /= acc;
            }
        }
        Self { cdf, tail }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let last = *self.cdf.last().unwrap();
        if u < last || self.tail.is_none() {
            return self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        }
        let (end, s) = self.tail.unwrap();
        let k_min = end as f64;
        loop {
            // Y has density ∝ y^{-s} on [end, ∞); k = ⌊Y⌋ + 1 is proposed with
            // mass ∝ ∫_{k-1}^{k} y^{-s} dy ≥ k^{-s}.
            let v: f64 = rng.random();
            let y = k_min * (1.0 - v).powf(-1.0 / (s - 1.0));
            if !y.is_finite() || y > 1e18 {
                continue;
            }
            let k = y.floor() + 1.0;
            let cell = ((k - 1.0).powf(1.0 - s) - k.powf(1.0 - s)) / (s - 1.0);
            if rng.random::<f64>() * cell <= k.powf(-s) {
                return k as usize;
            }
        }
    }
}

/// Mean, criticality parameter and third factorial moment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mu: f64,
    pub theta: f64,
    /// `E[D(D-1)(D-2)]`; `f64::INFINITY` when the tail makes it diverge.
    pub beta: f64,
}

/// A validated degree distribution with cached moments.
#[derive(Clone, Debug)]
pub struct DegreeLaw {
    pmf: Pmf,
    alpha: f64,
    c: f64,
    moments: Moments,
    sampler: Sampler,
}

fn compute_moments(pmf: &Pmf) -> Moments {
    let m1 = pmf.power_sum(1);
    let m2 = pmf.power_sum(2);
    let m3 = pmf.power_sum(3);
    let beta = if m3.is_finite() { m3 - 3.0 * m2 + 2.0 * m1 } else { f64::INFINITY };
    Moments { mu: m1, theta: (m2 - m1) / m1, beta }
}

/// Moments of a validated law.
pub fn moments(law: &DegreeLaw) -> Moments {
    law.moments
}

impl DegreeLaw {
    /// Finite-support law; reported as the `α = 2` regime with tail constant 0.
    pub fn finite(atoms: &[(usize, f64)]) -> Result<Self> {
        Self::build(Pmf::from_atoms(atoms), 2.0, 0.0)
    }

    /// Atoms below `k0` plus the tail `amp · k^{-(α+2)}` for `k ≥ k0`.
    pub fn power_tail(alpha: f64, k0: usize, atoms: &[(usize, f64)], amp: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::Validation(format!("tail exponent alpha={alpha} outside (1,2)")));
        }
        if amp < 0.0 || !amp.is_finite() {
            return Err(Error::Validation(format!("tail amplitude {amp} must be finite and non-negative")));
        }
        if k0 < 1 || atoms.iter().any(|a| a.0 >= k0) {
            return Err(Error::Validation("atoms must lie strictly below k0 >= 1".into()));
        }
        let pmf = Pmf::with_tail(atoms, PowerTail { k0, amp, exponent: alpha + 2.0 });
        Self::build(pmf, alpha, amp)
    }

    fn build(pmf: Pmf, alpha: f64, c: f64) -> Result<Self> {
        if pmf.head.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::Validation("negative or non-finite mass".into()));
        }
        if pmf.head.first().is_some_and(|&p| p != 0.0) {
            return Err(Error::Validation("degree laws live on k >= 1".into()));
        }
        let total = pmf.total();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("total mass {total} differs from 1")));
        }
        if pmf.prob(2) >= 1.0 - MASS_TOL {
            return Err(Error::Validation("the 2-regular law is excluded".into()));
        }
        let moments = compute_moments(&pmf);
        let sampler = pmf.sampler();
        Ok(Self { pmf, alpha, c, moments, sampler })
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.prob(k)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Tail constant `c` with `ν_k ~ c k^{-(α+2)}`; zero for finite support.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> f64 {
        self.moments.mu
    }

    pub fn theta(&self) -> f64 {
        self.moments.theta
    }

    pub fn beta(&self) -> f64 {
        self.moments.beta
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    pub fn is_finite(&self) -> bool {
        self.pmf.max_support().is_some()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }
}

impl DegreeLaw {
    /// `key=value` form: `alpha`, `k0`, `atom.<k>` and `tail.A`.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        for (k, p) in self.pmf.atoms() {
            kv.set(&format!("atom.{k}"), p);
        }
        if let Some(t) = self.pmf.tail() {
            kv.set("alpha", self.alpha);
            kv.set("k0", t.k0);
            kv.set("tail.A", t.amp);
        }
        kv
    }

    /// Reads a law from `key=value` entries. With `preset=critical`, the
    /// critical power law for `alpha`, `k0` (default 3) and optional
    /// `atom.2` is built; otherwise `atom.<k>` entries plus an optional
    /// `alpha`/`k0`/`tail.A` tail are taken literally.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        if let Some(preset) = kv.raw("preset") {
            if preset != "critical" {
                return Err(Error::Validation(format!("unknown law preset {preset:?}")));
            }
            let alpha = kv.get::<f64>("alpha")?.ok_or_else(|| Error::Validation("preset needs alpha".into()))?;
            return critical_power_law(alpha, kv.get_or("k0", 3)?, kv.get_or("atom.2", 0.0)?);
        }
        let mut atoms = Vec::new();
        for (k, v, line) in kv.with_prefix("atom.") {
            let k: usize = k.parse().map_err(|_| Error::Parse { line, msg: format!("bad atom index {k:?}") })?;
            let p: f64 = v.parse().map_err(|_| Error::Parse { line, msg: format!("bad atom mass {v:?}") })?;
            atoms.push((k, p));
        }
        match kv.get::<f64>("tail.A")? {
            Some(amp) => {
                let alpha = kv.get::<f64>("alpha")?.ok_or_else(|| Error::Validation("tail needs alpha".into()))?;
                let k0 = kv.get::<usize>("k0")?.ok_or_else(|| Error::Validation("tail needs k0".into()))?;
                Self::power_tail(alpha, k0, &atoms, amp)
            }
            None => Self::finite(&atoms),
        }
    }
}

/// Critical law with atom at 2 equal to zero; see [`critical_power_law`].
pub fn make_critical_power_law(alpha: f64, k0: usize) -> Result<DegreeLaw> {
    critical_power_law(alpha, k0, 0.0)
}

/// Atoms `a1` at 1 and `atom2` at 2 plus the tail `A k^{-(α+2)}` for `k ≥ k0`,
/// with `a1` found by bisection so that `θ = 1` and `A` fixed by normalisation.
pub fn critical_power_law(alpha: f64, k0: usize, atom2: f64) -> Result<DegreeLaw> {
    if !(alpha > 1.0 && alpha < 2.0) || k0 < 3 || !(0.0..1.0).contains(&atom2) {
        return Err(Error::Infeasible(format!("no critical law for alpha={alpha}, k0={k0}, atom2={atom2}")));
    }
    let z0 = hurwitz_zeta(alpha + 2.0, k0 as f64);
    let law_for = |a1: f64| -> Result<DegreeLaw> {
        let amp = (1.0 - a1 - atom2).max(0.0) / z0;
        DegreeLaw::power_tail(alpha, k0, &[(1, a1), (2, atom2)], amp)
    };
    let excess = |a1: f64| -> f64 {
        let amp = (1.0 - a1 - atom2).max(0.0) / z0;
        let pmf = Pmf::with_tail(&[(1, a1), (2, atom2)], PowerTail { k0, amp, exponent: alpha + 2.0 });
        compute_moments(&pmf).theta - 1.0
    };
    let (mut lo, mut hi) = (0.0, 1.0 - atom2);
    if excess(lo) <= 0.0 || excess(hi) >= 0.0 {
        return Err(Error::Infeasible(format!("theta - 1 does not change sign for alpha={alpha}, k0={k0}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a1 = if excess(lo).abs() < excess(hi).abs() { lo } else { hi };
    let law = law_for(a1)?;
    if (law.theta() - 1.0).abs() > 1e-10 {
        return Err(Error::Infeasible(format!("theta={} after root-finding", law.theta())));
    }
    Ok(law)
}

/// Degrees of the `n` vertices with even total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    total: usize,
}

impl DegreeSequence {
    /// Validates positivity and parity.
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.contains(&0) {
            return Err(arg("degrees must be positive"));
        }
        let total: usize = degrees.iter().sum();
        if total % 2 == 1 {
            return Err(arg(format!("degree total {total} is odd")));
        }
        Ok(Self { degrees, total })
    }

    /// Applies the parity fix: an odd total increments the last entry.
    pub fn from_draws(mut degrees: Vec<usize>) -> Result<Self> {
        if degrees.iter().sum::<usize>() % 2 == 1 {
            if let Some(last) = degrees.last_mut() {
                *last += 1;
            }
        }
        Self::new(degrees)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.degrees
    }
}

impl DegreeSequence {
    /// One degree per line.
    pub fn write<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.degrees {
            writeln!(out, "{d}")?;
        }
        Ok(())
    }

    pub fn read<R: std::io::BufRead>(input: R) -> Result<Self> {
        let mut degrees = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            degrees.push(t.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad degree {t:?}") })?);
        }
        Self::new(degrees)
    }
}

pub fn sample_degrees<R: Rng + ?Sized>(law: &DegreeLaw, n: usize, rng: &mut R) -> Result<DegreeSequence> {
    if n < 2 {
        return Err(arg(format!("need n >= 2, got {n}")));
    }
    let draws = (0..n).map(|_| law.sample(rng)).collect();
    DegreeSequence::from_draws(draws)
}

/// Indices of `seq` in size-biased random order.
///
/// Sorting by `E_j / D_j` with i.i.d. unit exponentials picks each next
/// index with probability proportional to its degree among those remaining.
pub fn size_biased_order<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = seq
        .degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let e: f64 = Exp1.sample(rng);
            (e / d as f64, i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, i)| i).collect()
}

pub fn size_biased_reorder<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> DegreeSequence {
    let order = size_biased_order(seq, rng);
    DegreeSequence { degrees: order.iter().map(|&i| seq.degrees[i]).collect(), total: seq.total }
}

/// The law of `Z` with `P(Z = k) = k ν_k / μ`.
pub fn size_biased_law(law: &DegreeLaw) -> Pmf {
    let mu = law.mu();
    let atoms: Vec<(usize, f64)> = law.pmf.atoms().into_iter().map(|(k, p)| (k, k as f64 * p / mu)).collect();
    match law.pmf.tail() {
        Some(t) => Pmf::with_tail(&atoms, PowerTail { k0: t.k0, amp: t.amp / mu, exponent: t.exponent - 1.0 }),
        None => Pmf::from_atoms(&atoms),
    }
}

/// How φ is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMode {
    /// Convolution of `ν` when `n - m ≤ cap`.
    Exact { cap: usize },
    /// Average over independent draws of `Ξ_{n-m}`.
    MonteCarlo { draws: usize },
}

impl PhiMode {
    pub fn exact() -> Self {
        PhiMode::Exact { cap: EXACT_PHI_CAP }
    }
}

/// Value of φ with its Monte Carlo standard error (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Distribution of the sum of `count` i.i.d. draws of a finite law, indexed by value.
pub fn convolution_power(law: &DegreeLaw, count: usize) -> Result<Vec<f64>> {
    let atoms = law.pmf.atoms();
    if law.pmf.max_support().is_none() {
        return Err(Error::Mode("exact convolution needs finite support".into()));
    }
    let mut dist = vec![1.0];
    for _ in 0..count {
        let mut next = vec![0.0; dist.len() + atoms.last().map_or(0, |a| a.0)];
        for (s, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(k, q) in &atoms {
                next[s + k] += p * q;
            }
        }
        dist = next;
    }
    Ok(dist)
}

fn phi_integrand(n: usize, k: &[usize], mu: f64, xi: f64) -> f64 {
    let mut suffix = xi;
    let mut prod = 1.0;
    for (idx, &kj) in k.iter().enumerate().rev() {
        suffix += kj as f64;
        // factor i = idx + 1 contributes (n - i + 1) μ / (Σ_{j ≥ i} k_j + Ξ)
        prod *= (n - idx) as f64 * mu / suffix;
    }
    prod
}

/// `φ_m^n(k) = E[∏_{i=1}^m (n-i+1)μ / (Σ_{j=i}^m k_j + Ξ_{n-m})]`.
pub fn phi_weight<R: Rng + ?Sized>(
    n: usize,
    k: &[usize],
    law: &DegreeLaw,
    mode: PhiMode,
    rng: &mut R,
) -> Result<Estimate> {
    let m = k.len();
    if m > n {
        return Err(arg(format!("m={m} exceeds n={n}")));
    }
    if k.contains(&0) {
        return Err(arg("degrees in k must be positive"));
    }
    let mu = law.mu();
    match mode {
        PhiMode::Exact { cap } => {
            if n - m > cap {
                return Err(Error::Mode(format!("n-m={} exceeds the exact cap {cap}", n - m)));
            }
            let dist = convolution_power(law, n - m)?;
            let value = dist
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(s, &p)| p * phi_integrand(n, k, mu, s as f64))
                .sum();
            Ok(Estimate { value, se: 0.0 })
        }
        PhiMode::MonteCarlo { draws } => {
            if draws < 2 {
                return Err(arg("monte-carlo mode needs at least two draws"));
            }
            let samples: Vec<f64> = (0..draws)
                .map(|_| {
                    let xi: usize = (0..n - m).map(|_| law.sample(rng)).sum();
                    phi_integrand(n, k, mu, xi as f64)
                })
                .collect();
            Ok(mean_and_se(&samples))
        }
    }
}

pub(crate) fn mean_and_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Estimate { value: mean, se: (var / n).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn law_13() -> DegreeLaw {
        DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap()
    }

    #[test]
    fn moments_of_two_atom_laws() {
        let m = DegreeLaw::finite(&[(1, 0.5), (3, 0.5)]).unwrap().moments();
        assert!((m.mu - 2.0).abs() < 1e-15 && (m.theta - 1.5).abs() < 1e-15);
        let m = law_13().moments();
        assert!((m.mu - 1.5).abs() < 1e-15 && (m.theta - 1.0).abs() < 1e-15);
        assert!((m.beta - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_laws() {
        assert!(matches!(DegreeLaw::finite(&[(2, 1.0)]), Err(Error::Validation(_))));
        assert!(matches!(DegreeLaw::finite(&[(1, 0.5), (3, 0.4)]), Err(Error::Validation(_))));
        assert!(matches!(DegreeLaw::finite(&[(1, 1.2), (3, -0.2)]), Err(Error::Validation(_))));
        assert!(matches!(DegreeLaw::finite(&[(0, 0.5), (3, 0.5)]), Err(Error::Validation(_))));
    }

    #[test]
    fn hurwitz_zeta_against_known_values() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90, ζ(2, 3) = π²/6 - 1 - 1/4
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        assert!((hurwitz_zeta(2.0, 3.0) - (pi * pi / 6.0 - 1.25)).abs() < 1e-14);
        // direct summation with an integral remainder for a non-integer exponent
        let s = 2.5;
        let direct: f64 = (3..200_000).map(|k| (k as f64).powf(-s)).sum::<f64>()
            + 200_000f64.powf(1.0 - s) / (s - 1.0)
            + 0.5 * 200_000f64.powf(-s);
        assert!((hurwitz_zeta(s, 3.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn critical_power_law_matches_closed_form_atom() {
        let law = make_critical_power_law(1.5, 3).unwrap();
        assert!((law.theta() - 1.0).abs() <= 1e-10);
        assert!((law.pmf().total() - 1.0).abs() <= 1e-12);
        // θ = 1 ⇔ a1 = A Σ_{k≥k0} k(k-2) k^{-s}
        let s = 3.5;
        let t2 = hurwitz_zeta(s - 2.0, 3.0) - 2.0 * hurwitz_zeta(s - 1.0, 3.0);
        assert!((law.prob(1) - law.c() * t2).abs() < 1e-12);
        assert!(law.mu() > 1.0 && law.mu() < 2.0);
        assert!(law.beta().is_infinite());
        let ratio = law.prob(20_000) / law.prob(10_000);
        assert!((ratio / 2f64.powf(-3.5) - 1.0).abs() < 0.01);
    }

    #[test]
    fn critical_family_is_feasible_with_an_atom_at_two() {
        let law = critical_power_law(1.2, 5, 0.3).unwrap();
        assert!((law.theta() - 1.0).abs() <= 1e-10);
        assert!((law.prob(2) - 0.3).abs() < 1e-15);
        assert!(matches!(make_critical_power_law(2.5, 3), Err(Error::Infeasible(_))));
        assert!(matches!(make_critical_power_law(1.5, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn parity_fix_touches_last_entry_only() {
        let s = DegreeSequence::from_draws(vec![1, 1, 3]).unwrap();
        assert_eq!(s.degrees(), &[1, 1, 4]);
        let s = DegreeSequence::from_draws(vec![1, 1, 1]).unwrap();
        assert_eq!(s.degrees(), &[1, 1, 2]);
        assert!(DegreeSequence::new(vec![1, 2]).is_err());
        let law = DegreeLaw::finite(&[(1, 1.0)]).unwrap();
        let mut rng = Stream::new(1);
        assert!(sample_degrees(&law, 1, &mut rng).is_err());
        assert_eq!(sample_degrees(&law, 5, &mut rng).unwrap().degrees(), &[1, 1, 1, 1, 2]);
    }

    #[test]
    fn sample_mean_in_clt_band() {
        let mut rng = Stream::new(11);
        let n = 100_000;
        let draws: Vec<usize> = (0..n).map(|_| law_13().sample(&mut rng)).collect();
        let mean = draws.iter().sum::<usize>() as f64 / n as f64;
        assert!((mean - 1.5).abs() < 3.0 * (0.75f64 / n as f64).sqrt());
    }

    #[test]
    fn tail_sampler_matches_pmf() {
        let law = make_critical_power_law(1.5, 3).unwrap();
        let mut rng = Stream::new(5);
        let n = 400_000;
        let mut above = 0usize;
        let mut ones = 0usize;
        for _ in 0..n {
            let k = law.sample(&mut rng);
            ones += (k == 1) as usize;
            above += (k > 2000) as usize;
        }
        let p_above = law.c() * hurwitz_zeta(3.5, 2001.0);
        let se = (p_above / n as f64).sqrt();
        assert!((above as f64 / n as f64 - p_above).abs() < 4.0 * se + 1e-7);
        let p1 = law.prob(1);
        assert!((ones as f64 / n as f64 - p1).abs() < 4.0 * (p1 * (1.0 - p1) / n as f64).sqrt());
    }

    #[test]
    fn size_biased_examples() {
        let mut rng = Stream::new(3);
        let s = DegreeSequence::new(vec![6]).unwrap();
        assert_eq!(size_biased_reorder(&s, &mut rng).degrees(), &[6]);
        let s = DegreeSequence::new(vec![1, 1]).unwrap();
        assert_eq!(size_biased_reorder(&s, &mut rng).degrees(), &[1, 1]);
        let z = size_biased_law(&law_13());
        assert!((z.prob(1) - 0.5).abs() < 1e-15 && (z.prob(3) - 0.5).abs() < 1e-15);
        assert!((z.mean() - 2.0).abs() < 1e-15);
        let z = size_biased_law(&DegreeLaw::finite(&[(1, 0.5), (3, 0.5)]).unwrap());
        assert!((z.prob(1) - 0.25).abs() < 1e-15 && (z.prob(3) - 0.75).abs() < 1e-15);
        let z = size_biased_law(&DegreeLaw::finite(&[(1, 1.0)]).unwrap());
        assert_eq!(z.atoms(), vec![(1, 1.0)]);
    }

    #[test]
    fn size_biased_tail_has_mean_two_at_criticality() {
        let z = size_biased_law(&make_critical_power_law(1.5, 3).unwrap());
        assert!((z.total() - 1.0).abs() < 1e-12);
        assert!((z.mean() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn key_value_round_trips() {
        let law = make_critical_power_law(1.5, 3).unwrap();
        let back = DegreeLaw::from_key_values(&KeyValues::parse(&law.to_key_values().to_text()).unwrap()).unwrap();
        assert_eq!(back.pmf(), law.pmf());
        let preset = DegreeLaw::from_key_values(&KeyValues::parse("preset=critical\nalpha=1.5\n").unwrap()).unwrap();
        assert_eq!(preset.pmf(), law.pmf());
        let finite = DegreeLaw::from_key_values(&KeyValues::parse("atom.1=0.75\natom.3=0.25").unwrap()).unwrap();
        assert_eq!(finite.pmf(), law_13().pmf());
        let seq = DegreeSequence::new(vec![1, 1, 4]).unwrap();
        let mut buf = Vec::new();
        seq.write(&mut buf).unwrap();
        assert_eq!(DegreeSequence::read(buf.as_slice()).unwrap(), seq);
    }

    #[test]
    fn phi_worked_values() {
        let mut rng = Stream::new(0);
        let law = law_13();
        let a = phi_weight(2, &[1], &law, PhiMode::exact(), &mut rng).unwrap();
        let b = phi_weight(2, &[3], &law, PhiMode::exact(), &mut rng).unwrap();
        assert!((a.value - 21.0 / 16.0).abs() < 1e-14);
        assert!((b.value - 11.0 / 16.0).abs() < 1e-14);
        assert!((0.5 * a.value + 0.5 * b.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_errors() {
        let mut rng = Stream::new(0);
        let law = law_13();
        assert!(phi_weight(1, &[1, 1], &law, PhiMode::exact(), &mut rng).is_err());
        assert!(matches!(phi_weight(20, &[1], &law, PhiMode::exact(), &mut rng), Err(Error::Mode(_))));
        let tail = make_critical_power_law(1.5, 3).unwrap();
        assert!(matches!(phi_weight(3, &[1], &tail, PhiMode::exact(), &mut rng), Err(Error::Mode(_))));
    }

    #[test]
    fn phi_monte_carlo_brackets_exact() {
        let mut rng = Stream::new(9);
        let law = law_13();
        let exact = phi_weight(8, &[3, 1], &law, PhiMode::exact(), &mut rng).unwrap().value;
        let mc = phi_weight(8, &[3, 1], &law, PhiMode::MonteCarlo { draws: 40_000 }, &mut rng).unwrap();
        assert!((mc.value - exact).abs() < 4.0 * mc.se);
    }
}
