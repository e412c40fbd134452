//! Coding paths: height processes, excursions above the running minimum,
//! size-biased point processes, marks with their close times, and rescaling.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{arg, Result};

/// Real-valued path sampled on a uniform grid starting at time 0.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPath {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridPath {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(arg("grid spacing must be positive"));
        }
        if values.is_empty() {
            return Err(arg("grid path needs at least one value"));
        }
        Ok(Self { dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.dt * i as f64
    }

    /// Grid index holding time `t` under càdlàg interpolation.
    pub fn index_at(&self, t: f64) -> usize {
        (((t / self.dt) + 1e-9).floor().max(0.0) as usize).min(self.values.len() - 1)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.values[self.index_at(t)]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", self.time(i), v)?;
        }
        Ok(())
    }
}

/// `G(n) = #{j < n : S(j) = min_{j≤k≤n} S(k)}` for a walk with down-steps of
/// size at most one; one value per index except the last.
pub fn height_from_walk(s: &[i64]) -> Result<Vec<i64>> {
    if s.windows(2).any(|w| w[1] - w[0] < -1) {
        return Err(arg("walk is not skip-free to the left"));
    }
    let n = s.len().saturating_sub(1);
    let mut stack: Vec<usize> = Vec::new();
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        while stack.last().is_some_and(|&j| s[j] > s[i]) {
            stack.pop();
        }
        g.push(stack.len() as i64);
        stack.push(i);
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Piecewise constant, right-continuous.
    Step,
    /// Piecewise linear between grid values.
    Linear,
}

/// Open point `(s, x)` of an excursion and the time `t` at which it closes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mark {
    pub s: f64,
    pub x: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkedExcursion {
    values: Vec<f64>,
    dt: f64,
    interpolation: Interpolation,
    /// Lattice unit subtracted from the level when closing discrete marks.
    lattice_unit: Option<f64>,
    pub marks: Vec<Mark>,
}

impl MarkedExcursion {
    pub fn new(values: Vec<f64>, dt: f64, interpolation: Interpolation) -> Result<Self> {
        if values.is_empty() || !(dt > 0.0) {
            return Err(arg("excursion needs values and a positive spacing"));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(arg("excursion values must be non-negative"));
        }
        Ok(Self { values, dt, interpolation, lattice_unit: None, marks: Vec::new() })
    }

    /// Integer excursion with unit spacing whose marks close one level below.
    pub fn lattice(values: &[i64]) -> Result<Self> {
        let mut ex = Self::new(values.iter().map(|&v| v as f64).collect(), 1.0, Interpolation::Step)?;
        ex.lattice_unit = Some(1.0);
        Ok(ex)
    }

    pub fn with_lattice_unit(mut self, unit: f64) -> Self {
        self.lattice_unit = Some(unit);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn zeta(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    pub fn value_at(&self, t: f64) -> f64 {
        if t >= self.zeta() {
            return *self.values.last().unwrap();
        }
        let pos = (t / self.dt).max(0.0);
        let i = pos.floor() as usize;
        match self.interpolation {
            Interpolation::Step => self.values[i],
            Interpolation::Linear => {
                let w = pos - i as f64;
                self.values[i] * (1.0 - w) + self.values[i + 1] * w
            }
        }
    }

    pub fn area(&self) -> f64 {
        let v = &self.values;
        match self.interpolation {
            Interpolation::Step => v[..v.len() - 1].iter().sum::<f64>() * self.dt,
            Interpolation::Linear => v.windows(2).map(|w| w[0] + w[1]).sum::<f64>() * self.dt / 2.0,
        }
    }

    /// `inf{t ≥ s : path(t) ≤ x}`, with the lattice unit subtracted from `x`
    /// for discrete excursions.
    pub fn close_time(&self, s: f64, x: f64) -> Result<f64> {
        let zeta = self.zeta();
        let tol = 1e-9 * (1.0 + zeta);
        if !(s >= 0.0 && s <= zeta + tol) {
            return Err(arg(format!("mark time {s} outside [0, {zeta}]")));
        }
        let here = self.value_at(s);
        if !(x >= 0.0 && x <= here + 1e-9 * (1.0 + here)) {
            return Err(arg(format!("mark level {x} outside [0, {here}]")));
        }
        let level = x - self.lattice_unit.unwrap_or(0.0);
        if here <= level {
            return Ok(s);
        }
        let start = ((s / self.dt).floor() as usize).min(self.values.len() - 1);
        for i in start..self.values.len() - 1 {
            let next = self.values[i + 1];
            if next <= level {
                let t_next = self.dt * (i + 1) as f64;
                return Ok(match self.interpolation {
                    Interpolation::Step => t_next,
                    Interpolation::Linear => {
                        let t0 = (self.dt * i as f64).max(s);
                        let v0 = self.value_at(t0);
                        t0 + (t_next - t0) * (v0 - level) / (v0 - next)
                    }
                });
            }
        }
        Ok(zeta)
    }

    /// Add an open point and compute its close time.
    pub fn add_mark(&mut self, s: f64, x: f64) -> Result<Mark> {
        let mark = Mark { s, x, t: self.close_time(s, x)? };
        self.marks.push(mark);
        Ok(mark)
    }

    pub fn write_marks_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,x,t")?;
        for m in &self.marks {
            writeln!(out, "{},{},{}", m.s, m.x, m.t)?;
        }
        Ok(())
    }
}

/// An excursion of a path above its running minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Excursion {
    pub start: usize,
    pub excursion: MarkedExcursion,
    /// False when the path ends before returning to the minimum.
    pub complete: bool,
}

impl Excursion {
    pub fn len(&self) -> usize {
        self.excursion.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Split a path into the intervals between successive strict running minima.
/// Each excursion holds `f - f(start)` on `[start, end]`, clamped at zero so
/// the closing value is `0`.
pub fn excursions_above_min(path: &[f64], dt: f64, interpolation: Interpolation) -> Result<Vec<Excursion>> {
    let mut out = Vec::new();
    if path.is_empty() {
        return Ok(out);
    }
    let mut start = 0usize;
    let mut low = path[0];
    let mut push = |a: usize, b: usize, low: f64, complete: bool| -> Result<()> {
        let mut values: Vec<f64> = path[a..=b].iter().map(|&v| (v - low).max(0.0)).collect();
        if complete {
            *values.last_mut().unwrap() = 0.0;
        }
        out.push(Excursion { start: a, excursion: MarkedExcursion::new(values, dt, interpolation)?, complete });
        Ok(())
    };
    for (i, &v) in path.iter().enumerate().skip(1) {
        if v < low {
            push(start, i, low, true)?;
            start = i;
            low = v;
        }
    }
    if start + 1 < path.len() {
        push(start, path.len() - 1, low, false)?;
    }
    Ok(out)
}

/// Integer version for lattice walks; marks close one unit below their level.
pub fn lattice_excursions(walk: &[i64]) -> Result<Vec<Excursion>> {
    let as_f: Vec<f64> = walk.iter().map(|&v| v as f64).collect();
    let mut ex = excursions_above_min(&as_f, 1.0, Interpolation::Step)?;
    for e in &mut ex {
        e.excursion.lattice_unit = Some(1.0);
    }
    Ok(ex)
}

/// Indices sorted by decreasing length; ties keep their original order.
pub fn ord_desc<T: PartialOrd + Copy>(lengths: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..lengths.len()).collect();
    idx.sort_by(|&a, &b| lengths[b].partial_cmp(&lengths[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbpPoint {
    /// Total size discovered before this element.
    pub sigma: f64,
    pub y: f64,
    pub index: usize,
}

/// Size-biased point process: each element arrives at an `Exp(y)` time.
pub fn sbpp_sample<R: Rng + ?Sized>(y: &[f64], rng: &mut R) -> Result<Vec<SbpPoint>> {
    if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(arg("sizes must be positive and finite"));
    }
    let mut arrivals: Vec<(f64, usize)> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| (Exp::new(v).expect("positive rate").sample(rng), i))
        .collect();
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sigma = 0.0;
    Ok(arrivals
        .into_iter()
        .map(|(_, i)| {
            let p = SbpPoint { sigma, y: y[i], index: i };
            sigma += y[i];
            p
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Walk,
    Height,
}

/// Scaling exponents `(time, value)` for a size-`n` walk or height process.
pub fn scaling_exponents(alpha: f64, kind: PathKind) -> (f64, f64) {
    let time = alpha / (alpha + 1.0);
    let value = match kind {
        PathKind::Walk => 1.0 / (alpha + 1.0),
        PathKind::Height => (alpha - 1.0) / (alpha + 1.0),
    };
    (time, value)
}

/// Time divided by `n^{α/(α+1)}`, values by `n^{1/(α+1)}` or `n^{(α-1)/(α+1)}`.
pub fn rescale(path: &[i64], n: usize, alpha: f64, kind: PathKind) -> Result<GridPath> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(arg("alpha must lie in (1, 2]"));
    }
    let (te, ve) = scaling_exponents(alpha, kind);
    let nf = n as f64;
    let scale = nf.powf(-ve);
    GridPath::new(nf.powf(-te), path.iter().map(|&v| v as f64 * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn height_examples() {
        assert_eq!(height_from_walk(&[0, 1, 0, 0, -1]).unwrap(), vec![0, 1, 1, 2]);
        assert_eq!(height_from_walk(&[0, -1]).unwrap(), vec![0]);
        assert!(height_from_walk(&[0, -2]).is_err());
    }

    #[test]
    fn excursion_examples() {
        let ex = excursions_above_min(&[0.0, 1.0, 0.0, -1.0, 0.0, -2.0], 1.0, Interpolation::Step).unwrap();
        let spans: Vec<(usize, usize, bool)> = ex.iter().map(|e| (e.start, e.len(), e.complete)).collect();
        assert_eq!(spans, vec![(0, 3, true), (3, 2, true)]);
        assert_eq!(ex[0].excursion.values(), &[0.0, 1.0, 0.0, 0.0]);

        let down = excursions_above_min(&[0.0, -1.0, -2.0, -3.0], 1.0, Interpolation::Step).unwrap();
        assert_eq!(down.len(), 3);
        assert!(down.iter().all(|e| e.len() == 1 && e.complete));

        let up = excursions_above_min(&[0.0, 1.0, 2.0, 1.0], 1.0, Interpolation::Step).unwrap();
        assert_eq!(up.len(), 1);
        assert_eq!((up[0].len(), up[0].complete), (3, false));
    }

    #[test]
    fn ordering() {
        assert_eq!(ord_desc(&[1, 3, 2]), vec![1, 2, 0]);
        assert_eq!(ord_desc(&[2, 2, 2]), vec![0, 1, 2]);
        assert!(ord_desc::<usize>(&[]).is_empty());
    }

    #[test]
    fn areas() {
        let tent = MarkedExcursion::new(vec![0.0, 1.0, 0.0], 1.0, Interpolation::Linear).unwrap();
        assert!((tent.area() - 1.0).abs() < 1e-12);
        let zero = MarkedExcursion::new(vec![0.0; 5], 0.5, Interpolation::Step).unwrap();
        assert_eq!(zero.area(), 0.0);
        assert_eq!(MarkedExcursion::lattice(&[0, 1, 1, 0]).unwrap().area(), 2.0);
    }

    #[test]
    fn close_times() {
        let tent = MarkedExcursion::new(vec![0.0, 1.0, 0.0], 1.0, Interpolation::Linear).unwrap();
        assert!((tent.close_time(0.5, 0.25).unwrap() - 1.75).abs() < 1e-12);
        assert_eq!(tent.close_time(0.5, 0.5).unwrap(), 0.5);
        assert_eq!(tent.close_time(0.5, 0.0).unwrap(), 2.0);
        assert!(tent.close_time(3.0, 0.0).is_err());
        assert!(tent.close_time(0.5, 0.9).is_err());

        let lat = MarkedExcursion::lattice(&[0, 1, 0, 0]).unwrap();
        assert_eq!(lat.close_time(1.0, 1.0).unwrap(), 2.0);
        let lat = MarkedExcursion::lattice(&[0, 2, 2, 1, 0]).unwrap();
        assert_eq!(lat.close_time(1.0, 2.0).unwrap(), 3.0);
        assert_eq!(lat.close_time(1.0, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn sbpp_basics() {
        let mut rng = Stream::new(5);
        let p = sbpp_sample(&[2.0], &mut rng).unwrap();
        assert_eq!(p, vec![SbpPoint { sigma: 0.0, y: 2.0, index: 0 }]);
        assert!(sbpp_sample(&[1.0, 0.0], &mut rng).is_err());
    }

    #[test]
    fn rescale_exponents() {
        assert_eq!(scaling_exponents(2.0, PathKind::Walk), (2.0 / 3.0, 1.0 / 3.0));
        let (t, v) = scaling_exponents(1.5, PathKind::Walk);
        assert!((t - 0.6).abs() < 1e-12 && (v - 0.4).abs() < 1e-12);
        assert!((scaling_exponents(1.5, PathKind::Height).1 - 0.2).abs() < 1e-12);
        let g = rescale(&[0, 0, 0], 1000, 2.0, PathKind::Walk).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
        assert!((g.dt - 0.01).abs() < 1e-12);
    }
}
