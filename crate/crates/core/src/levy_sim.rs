//! Spectrally positive Lévy processes on a grid: the α-stable (or Brownian)
//! process `L`, its tilted version `L̃`, reflection, the change-of-measure
//! weight Φ, inverse local time and the Cox process of surplus marks.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

pub use crate::coding_paths::GridPath;
use crate::error::{arg, Error, Result};

/// Parameters of `L` with `E[exp(-λ L_t)] = exp(t C_α λ^α / μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyParams {
    pub alpha: f64,
    /// Tail constant of the Lévy measure `c x^{-α-1} dx` (unused when α = 2).
    pub c: f64,
    /// Brownian variance parameter (used only when α = 2).
    pub beta: f64,
    pub mu: f64,
}

impl LevyParams {
    pub fn stable(alpha: f64, c: f64, mu: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(arg("stable index must lie in (1, 2)"));
        }
        if !(c > 0.0 && mu > 0.0) {
            return Err(arg("c and mu must be positive"));
        }
        Ok(Self { alpha, c, beta: 0.0, mu })
    }

    pub fn brownian(beta: f64, mu: f64) -> Result<Self> {
        if !(beta > 0.0 && mu > 0.0) {
            return Err(arg("beta and mu must be positive"));
        }
        Ok(Self { alpha: 2.0, c: 0.0, beta, mu })
    }

    pub fn is_brownian(&self) -> bool {
        self.alpha >= 2.0
    }

    /// `C_α = c Γ(2-α) / (α(α-1))`, or `β/2` in the Brownian case.
    pub fn c_alpha(&self) -> f64 {
        if self.is_brownian() {
            self.beta / 2.0
        } else {
            self.c * gamma(2.0 - self.alpha) / (self.alpha * (self.alpha - 1.0))
        }
    }

    /// `Ψ(λ) = C_α λ^α / μ`.
    pub fn psi(&self, lambda: f64) -> f64 {
        self.c_alpha() * lambda.powf(self.alpha) / self.mu
    }

    /// Drift of the tilted process, `A_t = -C_α t^α / μ^α`.
    pub fn drift(&self, t: f64) -> f64 {
        -self.c_alpha() * t.powf(self.alpha) / self.mu.powf(self.alpha)
    }

    /// `C_α t^{α+1} / ((α+1) μ^{α+1})`.
    pub fn weight_exponent(&self, t: f64) -> f64 {
        let a1 = self.alpha + 1.0;
        self.c_alpha() * t.powf(a1) / (a1 * self.mu.powf(a1))
    }
}

/// General spectrally positive exponent
/// `Ψ(λ) = γλ + δ²λ²/2 + ∫ (e^{-λx} - 1 + λx) π(dx)`
/// with `π` a finite set of atoms plus an optional `c x^{-α-1} dx` tail.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneralExponent {
    pub gamma: f64,
    pub delta: f64,
    pub atoms: Vec<(f64, f64)>,
    /// `(c, α)` of a stable tail on `(0, ∞)`.
    pub stable_tail: Option<(f64, f64)>,
}

impl GeneralExponent {
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(arg("lambda must be non-negative"));
        }
        let mut psi = self.gamma * lambda + self.delta * self.delta * lambda * lambda / 2.0;
        for &(x, m) in &self.atoms {
            let z = lambda * x;
            psi += m * ((-z).exp_m1() + z);
        }
        if let Some((c, alpha)) = self.stable_tail {
            psi += c * gamma(2.0 - alpha) / (alpha * (alpha - 1.0)) * lambda.powf(alpha);
        }
        Ok(psi)
    }
}

/// `Ψ(λ)` for the stable (or Brownian) parameters, or the general form.
pub fn levy_exponent(params: &LevyParams, lambda: f64, general: Option<&GeneralExponent>) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(arg("lambda must be non-negative"));
    }
    match general {
        Some(g) => g.eval(lambda),
        None => Ok(params.psi(lambda)),
    }
}

fn grid_len(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(arg("need dt > 0 and a non-negative horizon"));
    }
    Ok((horizon / dt + 1e-9).floor() as usize + 1)
}

/// One increment of `L` over a time step `dt`.
pub fn levy_increment<R: Rng + ?Sized>(params: &LevyParams, dt: f64, rng: &mut R) -> f64 {
    if params.is_brownian() {
        let z: f64 = rng.sample(StandardNormal);
        return (params.beta / params.mu * dt).sqrt() * z;
    }
    let a = params.alpha;
    let tan = (PI * a / 2.0).tan();
    let sigma = (params.c_alpha() / params.mu * dt * (PI * a / 2.0).cos().abs()).powf(1.0 / a);
    let b = tan.atan() / a;
    let s = (1.0 + tan * tan).powf(1.0 / (2.0 * a));
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    let x = s * (a * (v + b)).sin() / v.cos().powf(1.0 / a) * ((v - a * (v + b)).cos() / w).powf((1.0 - a) / a);
    sigma * x
}

/// `L` on the grid `0, dt, …, ⌊T/dt⌋ dt`.
pub fn simulate_l<R: Rng + ?Sized>(params: &LevyParams, horizon: f64, dt: f64, rng: &mut R) -> Result<GridPath> {
    let len = grid_len(horizon, dt)?;
    let mut values = Vec::with_capacity(len);
    let mut l = 0.0;
    values.push(l);
    for _ in 1..len {
        l += levy_increment(params, dt, rng);
        values.push(l);
    }
    GridPath::new(dt, values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TiltMethod {
    /// Time-inhomogeneous jump construction; `eps_cut` defaults to `dt^{1/α}`.
    Direct { eps_cut: Option<f64> },
    /// Exact Gaussian construction, Brownian case only.
    ExactBrownian,
}

/// The tilted process `L̃ = X + A`, where `X` is the compensated sum of jumps
/// with intensity `(c/μ) x^{-α-1} e^{-xs/μ} ds dx`.
pub fn simulate_tilted<R: Rng + ?Sized>(
    params: &LevyParams,
    horizon: f64,
    dt: f64,
    rng: &mut R,
    method: TiltMethod,
) -> Result<GridPath> {
    let len = grid_len(horizon, dt)?;
    let mut values = Vec::with_capacity(len);
    values.push(0.0);
    let mu = params.mu;

    let eps = match method {
        TiltMethod::Direct { eps_cut } if !params.is_brownian() => {
            let eps = eps_cut.unwrap_or(dt.powf(1.0 / params.alpha));
            if !(eps > 0.0) {
                return Err(arg("eps_cut must be positive"));
            }
            Some(eps)
        }
        TiltMethod::Direct { eps_cut: Some(e) } if !(e > 0.0) => return Err(arg("eps_cut must be positive")),
        _ => None,
    };

    if let Some(eps) = eps {
        let (a, c) = (params.alpha, params.c);
        let big_rate = c / mu * eps.powf(-a) / a * dt;
        let poisson = Poisson::new(big_rate).map_err(|e| arg(e.to_string()))?;
        let gamma_2a = gamma(2.0 - a);
        let mut x = 0.0;
        for i in 1..len {
            let t0 = (i - 1) as f64 * dt;
            let s = t0 + dt / 2.0;
            let z = eps * s / mu;
            // ∫_ε^∞ x ν_s(dx) and ∫_0^ε x² ν_s(dx)
            let (comp, var) = if z < 1e-12 {
                (c / mu * eps.powf(1.0 - a) / (a - 1.0), c / mu * eps.powf(2.0 - a) / (2.0 - a))
            } else {
                let upper_2a = gamma_ur(2.0 - a, z) * gamma_2a;
                let upper_1a = (upper_2a - z.powf(1.0 - a) * (-z).exp()) / (1.0 - a);
                let lower_2a = gamma_lr(2.0 - a, z) * gamma_2a;
                (c / mu * (s / mu).powf(a - 1.0) * upper_1a, c / mu * (s / mu).powf(a - 2.0) * lower_2a)
            };
            let count = poisson.sample(rng) as u64;
            for _ in 0..count {
                let jump = eps * rng.random::<f64>().powf(-1.0 / a);
                let time = t0 + dt * rng.random::<f64>();
                if rng.random::<f64>() < (-jump * time / mu).exp() {
                    x += jump;
                }
            }
            let g: f64 = rng.sample(StandardNormal);
            x += -comp * dt + (var * dt).sqrt() * g;
            values.push(x + params.drift(i as f64 * dt));
        }
    } else {
        if !params.is_brownian() {
            return Err(Error::Mode("exact construction needs the Brownian case".into()));
        }
        let sd = (params.beta / mu * dt).sqrt();
        let mut b = 0.0;
        for i in 1..len {
            let g: f64 = rng.sample(StandardNormal);
            b += sd * g;
            values.push(b + params.drift(i as f64 * dt));
        }
    }
    GridPath::new(dt, values)
}

/// `R_t = path_t - min_{s≤t} path_s`.
pub fn reflect(path: &GridPath) -> GridPath {
    let mut low = f64::INFINITY;
    let values = path
        .values
        .iter()
        .map(|&v| {
            low = low.min(v);
            v - low
        })
        .collect();
    GridPath { dt: path.dt, values }
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    values.windows(2).map(|w| w[0] + w[1]).sum::<f64>() * dt / 2.0
}

fn grid_index(path: &GridPath, t: f64) -> Result<usize> {
    if !(t >= 0.0) || t > path.horizon() * (1.0 + 1e-12) + 1e-12 {
        return Err(arg(format!("time {t} outside [0, {}]", path.horizon())));
    }
    Ok(((t / path.dt).round() as usize).min(path.len() - 1))
}

fn log_weight_at_index(path: &GridPath, m: usize, params: &LevyParams) -> f64 {
    let t = path.time(m);
    let stoch = t * path.values[m] - trapezoid(&path.values[..=m], path.dt);
    -stoch / params.mu - params.weight_exponent(t)
}

/// `Φ(t) = exp(-(1/μ) ∫_0^t s dL_s - C_α t^{α+1}/((α+1)μ^{α+1}))`, the
/// stochastic integral taken as `t L_t - ∫_0^t L_s ds`.
pub fn rn_weight(path: &GridPath, t: f64, params: &LevyParams) -> Result<f64> {
    let m = grid_index(path, t)?;
    Ok(log_weight_at_index(path, m, params).exp())
}

/// First grid index at which the running infimum drops below `-ell`.
pub fn inverse_local_time_index(path: &GridPath, ell: f64) -> Option<usize> {
    path.values.iter().position(|&v| v < -ell)
}

/// First grid time at which the running infimum drops below `-ell`; `None`
/// when the horizon is exhausted first.
pub fn inverse_local_time(path: &GridPath, ell: f64) -> Option<f64> {
    inverse_local_time_index(path, ell).map(|i| path.time(i))
}

/// Poisson marks under the graph of `R` with intensity `1/μ`, cell by cell.
pub fn cox_marks<R: Rng + ?Sized>(r: &GridPath, mu: f64, rng: &mut R) -> Result<Vec<(f64, f64)>> {
    if !(mu > 0.0) {
        return Err(arg("mu must be positive"));
    }
    let dt = r.dt;
    let mut marks = Vec::new();
    for (i, &h) in r.values[..r.len() - 1].iter().enumerate() {
        if h < 0.0 {
            return Err(arg("reflected path must be non-negative"));
        }
        let rate = h * dt / mu;
        if rate <= 0.0 {
            continue;
        }
        let count = Poisson::new(rate).map_err(|e| arg(e.to_string()))?.sample(rng) as usize;
        for _ in 0..count {
            let s = (i as f64 + rng.random::<f64>()) * dt;
            marks.push((s, h * rng.random::<f64>()));
        }
    }
    Ok(marks)
}

/// Both sides of the weight identity at `σ_ℓ`: `Φ(σ_ℓ)` against the same
/// weight rebuilt from the inverse local time and the excursion areas of
/// `L - I`.
pub fn stopped_weight_identity(path: &GridPath, ell: f64, params: &LevyParams) -> Result<(f64, f64)> {
    let (lhs, rhs) = stopped_weight_log_identity(path, ell, params)?;
    Ok((lhs.exp(), rhs.exp()))
}

/// Logarithms of the two sides of [`stopped_weight_identity`].
pub fn stopped_weight_log_identity(path: &GridPath, ell: f64, params: &LevyParams) -> Result<(f64, f64)> {
    let m = inverse_local_time_index(path, ell)
        .ok_or_else(|| Error::Precondition(format!("inverse local time at {ell} beyond the horizon")))?;
    let dt = path.dt;
    let t = path.time(m);
    let lhs = log_weight_at_index(path, m, params);
    let mut low = 0.0f64;
    let mut sigma_integral = 0.0;
    let mut gaps = Vec::with_capacity(m + 1);
    for (i, &v) in path.values[..=m].iter().enumerate() {
        if v < low {
            sigma_integral += i as f64 * dt * (low - v);
            low = v;
        }
        gaps.push(v - low);
    }
    let rhs = (sigma_integral + trapezoid(&gaps, dt)) / params.mu - params.weight_exponent(t);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn stable15() -> LevyParams {
        LevyParams::stable(1.5, 1.0, 1.5).unwrap()
    }

    #[test]
    fn exponent_examples() {
        let b = LevyParams::brownian(1.0, 1.0).unwrap();
        assert!((levy_exponent(&b, 2.0, None).unwrap() - 2.0).abs() < 1e-12);
        let s = stable15();
        let c15 = 4.0 * PI.sqrt() / 3.0;
        assert!((s.c_alpha() - c15).abs() < 1e-9);
        assert!((levy_exponent(&s, 1.0, None).unwrap() - c15 / 1.5).abs() < 1e-9);
        assert_eq!(levy_exponent(&s, 0.0, None).unwrap(), 0.0);
        assert!(levy_exponent(&s, -1.0, None).is_err());
    }

    #[test]
    fn general_exponent_reduces_to_stable() {
        let g = GeneralExponent { stable_tail: Some((1.0, 1.5)), ..Default::default() };
        let s = LevyParams::stable(1.5, 1.0, 1.0).unwrap();
        for lambda in [0.3, 1.0, 2.5] {
            assert!((g.eval(lambda).unwrap() - s.psi(lambda)).abs() < 1e-9);
        }
        let atom = GeneralExponent { atoms: vec![(1.0, 2.0)], gamma: 0.5, ..Default::default() };
        let want = 0.5 + 2.0 * ((-1.0f64).exp() - 1.0 + 1.0);
        assert!((atom.eval(1.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn reflect_examples() {
        let p = GridPath::new(1.0, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        assert_eq!(reflect(&p).values, vec![0.0, 1.0, 0.0, 1.0]);
        let down = GridPath::new(1.0, vec![0.0, -1.0, -2.0]).unwrap();
        assert!(reflect(&down).values.iter().all(|&v| v == 0.0));
        let up = GridPath::new(1.0, vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(reflect(&up).values, up.values);
    }

    #[test]
    fn weight_deterministic_cases() {
        let s = stable15();
        let zero = GridPath::new(0.01, vec![0.0; 201]).unwrap();
        let want = (-s.weight_exponent(1.0)).exp();
        assert!((rn_weight(&zero, 1.0, &s).unwrap() - want).abs() < 1e-12);
        assert_eq!(rn_weight(&zero, 0.0, &s).unwrap(), 1.0);
        assert!(rn_weight(&zero, 3.0, &s).is_err());
    }

    #[test]
    fn inverse_local_time_examples() {
        let dt = 1e-3;
        let drift = GridPath::new(dt, (0..3001).map(|i| -(i as f64) * dt).collect()).unwrap();
        assert!((inverse_local_time(&drift, 1.0).unwrap() - 1.0).abs() <= 2.0 * dt);
        assert_eq!(inverse_local_time(&drift, 0.0), Some(dt));
        let flat = GridPath::new(dt, vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(inverse_local_time(&flat, 0.0), None);
    }

    #[test]
    fn stopped_identity_on_drift() {
        let s = stable15();
        let dt = 1e-4;
        let drift = GridPath::new(dt, (0..20001).map(|i| -(i as f64) * dt).collect()).unwrap();
        let (lhs, rhs) = stopped_weight_identity(&drift, 1.0, &s).unwrap();
        let want = (1.0 / (2.0 * s.mu) - s.weight_exponent(1.0)).exp();
        assert!((lhs / want - 1.0).abs() < 1e-3 && (rhs / want - 1.0).abs() < 1e-3);
        let (a, b) = stopped_weight_identity(&drift, 0.0, &s).unwrap();
        assert!((a - 1.0).abs() < 1e-3 && (b - 1.0).abs() < 1e-3);
        let flat = GridPath::new(dt, vec![0.0; 10]).unwrap();
        assert!(matches!(stopped_weight_identity(&flat, 1.0, &s), Err(Error::Precondition(_))));
    }

    #[test]
    fn cox_zero_and_constant() {
        let mut rng = Stream::new(9);
        let zero = GridPath::new(0.1, vec![0.0; 11]).unwrap();
        assert!(cox_marks(&zero, 1.2, &mut rng).unwrap().is_empty());
        let h = GridPath::new(0.01, vec![2.0; 101]).unwrap();
        let reps = 4000;
        let total: usize = (0..reps).map(|_| cox_marks(&h, 1.25, &mut rng).unwrap().len()).sum();
        let mean = total as f64 / reps as f64;
        let want = 2.0 * 1.0 / 1.25;
        assert!((mean - want).abs() < 3.0 * (want / reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn stable_laplace_transform() {
        let s = stable15();
        let mut rng = Stream::new(10);
        let draws: Vec<f64> = (0..100_000).map(|_| levy_increment(&s, 1.0, &mut rng)).collect();
        for lambda in [0.5, 1.0, 2.0] {
            let w: Vec<f64> = draws.iter().map(|&x| (-lambda * x).exp()).collect();
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
            let se = (var / w.len() as f64).sqrt() / mean;
            assert!((mean.ln() - s.psi(lambda)).abs() < 3.0 * se + 1e-3, "λ={lambda}: {} vs {}", mean.ln(), s.psi(lambda));
        }
    }

    #[test]
    fn brownian_tilt_mean() {
        let b = LevyParams::brownian(1.0, 1.0).unwrap();
        let mut rng = Stream::new(11);
        let ends: Vec<f64> = (0..4000)
            .map(|_| *simulate_tilted(&b, 1.0, 0.01, &mut rng, TiltMethod::ExactBrownian).unwrap().values.last().unwrap())
            .collect();
        let mean = ends.iter().sum::<f64>() / ends.len() as f64;
        assert!((mean + 0.5).abs() < 3.0 * (1.0 / ends.len() as f64).sqrt());
        assert!(simulate_tilted(&stable15(), 1.0, 0.01, &mut rng, TiltMethod::ExactBrownian).is_err());
        assert!(simulate_tilted(&stable15(), 1.0, 0.01, &mut rng, TiltMethod::Direct { eps_cut: Some(-1.0) }).is_err());
    }
}
