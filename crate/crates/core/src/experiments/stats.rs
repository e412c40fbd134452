//! Small statistical helpers for experiment reports.

pub use crate::degree_model::Estimate;

pub fn mean_se(xs: &[f64]) -> Estimate {
    crate::degree_model::mean_and_se(xs)
}

/// Ratio `Σa / Σb` over paired replicas with a delta-method standard error.
pub fn ratio_of_sums(a: &[f64], b: &[f64]) -> Estimate {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let r = ma / mb;
    let var = a.iter().zip(b).map(|(x, y)| (x - r * y).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Estimate { value: r, se: (var / n).sqrt() / mb }
}

pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Variance-to-mean ratio of counts.
pub fn dispersion_index(counts: &[f64]) -> f64 {
    let e = mean_se(counts);
    let var = e.se * e.se * counts.len() as f64;
    var / e.value
}

/// Hill estimate of `a` in `P(X > x) ~ x^{-a}` from the `k` largest values.
pub fn hill_estimator(xs: &[f64], k: usize) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| *x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = k.min(v.len() - 1);
    let base = v[k].ln();
    let h = v[..k].iter().map(|x| x.ln() - base).sum::<f64>() / k as f64;
    1.0 / h
}

/// Ordinary least-squares slope of `y` on `x`, with its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = if x.len() > 2 { (resid / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Estimate { value: slope, se }
}
