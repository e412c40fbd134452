//! Finite measured metric spaces built from excursions and graphs: R-trees
//! coded by height functions, quotients by identified pairs, GHP comparisons
//! and samples of the limiting components through tilted discrete proxies.

mod ghp;
mod limit;

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::seq::index::sample as sample_indices;
use rand::Rng;

pub use ghp::{ghp_estimate, ghp_exact, ghp_upper_bound_trees, GhpEstimate, EXACT_GHP_MAX_POINTS};
pub use limit::{build_limit_space, feasible_proxy_size, proxy_excursion, sample_limit_component, LimitComponent, ProxyConfig, ProxyExcursion};

use crate::coding_paths::{Interpolation, MarkedExcursion};
use crate::error::{arg, Error, Result};

/// Finite metric space with a mass on every point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMms {
    k: usize,
    dist: Vec<f64>,
    mass: Vec<f64>,
    /// Coding times of the points, when the space comes from an excursion.
    times: Option<Vec<f64>>,
}

impl FiniteMms {
    /// Row-major `k × k` distances. Checks symmetry, zero diagonal and
    /// non-negativity; the triangle inequality is audited separately.
    pub fn new(dist: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        let k = mass.len();
        if dist.len() != k * k {
            return Err(arg("distance matrix does not match the number of masses"));
        }
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(arg("masses must be finite and non-negative"));
        }
        for i in 0..k {
            if dist[i * k + i].abs() > 1e-9 {
                return Err(arg("non-zero diagonal distance"));
            }
            for j in 0..i {
                let (a, b) = (dist[i * k + j], dist[j * k + i]);
                if !(a >= -1e-9) || !a.is_finite() || (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                    return Err(arg(format!("distance ({i},{j}) is negative, infinite or asymmetric")));
                }
            }
        }
        Ok(Self { k, dist, mass, times: None })
    }

    pub fn from_rows(rows: &[Vec<f64>], mass: Vec<f64>) -> Result<Self> {
        Self::new(rows.concat(), mass)
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Result<Self> {
        if times.len() != self.k {
            return Err(arg("one time per point required"));
        }
        self.times = Some(times);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.k + j]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn times(&self) -> Option<&[f64]> {
        self.times.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Distances and masses multiplied by the given factors.
    pub fn scaled(&self, dist_factor: f64, mass_factor: f64) -> Self {
        Self {
            k: self.k,
            dist: self.dist.iter().map(|d| d * dist_factor).collect(),
            mass: self.mass.iter().map(|m| m * mass_factor).collect(),
            times: self.times.clone(),
        }
    }

    /// First triple breaking the triangle inequality by more than `tol`.
    pub fn triangle_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        for i in 0..self.k {
            for j in 0..self.k {
                for l in 0..self.k {
                    if self.d(i, l) > self.d(i, j) + self.d(j, l) + tol {
                        return Some((i, j, l));
                    }
                }
            }
        }
        None
    }

    /// Random triangle audit; true when all sampled triples pass.
    pub fn audit_triangles<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, tol: f64) -> bool {
        if self.k == 0 {
            return true;
        }
        (0..count).all(|_| {
            let (i, j, l) = (rng.random_range(0..self.k), rng.random_range(0..self.k), rng.random_range(0..self.k));
            self.d(i, l) <= self.d(i, j) + self.d(j, l) + tol
        })
    }

    /// Writes `k=…`, then one mass per line, then `k` comma-separated rows.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k={}", self.k)?;
        for m in &self.mass {
            writeln!(out, "{m}")?;
        }
        for i in 0..self.k {
            let row: Vec<String> = (0..self.k).map(|j| self.d(i, j).to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(s))) => Ok((i, s)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::Parse { line: 0, msg: format!("missing {what}") }),
            }
        };
        let (line, header) = next("header")?;
        let k: usize = header
            .trim()
            .strip_prefix("k=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse { line, msg: "expected k=<count>".into() })?;
        let parse = |line: usize, s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse { line, msg: format!("bad number {s:?}") })
        };
        let mut mass = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, s) = next("mass line")?;
            mass.push(parse(line, &s)?);
        }
        let mut dist = Vec::with_capacity(k * k);
        for _ in 0..k {
            let (line, s) = next("distance row")?;
            let row: Vec<f64> = s.split(',').map(|v| parse(line, v)).collect::<Result<_>>()?;
            if row.len() != k {
                return Err(Error::Parse { line, msg: format!("expected {k} entries, found {}", row.len()) });
            }
            dist.extend(row);
        }
        Self::new(dist, mass)
    }
}

/// Sparse table answering range-minimum queries over grid values.
struct RangeMin {
    levels: Vec<Vec<f64>>,
}

impl RangeMin {
    fn new(values: &[f64]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..prev.len() - width).map(|i| prev[i].min(prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Minimum over indices `lo..=hi`.
    fn min(&self, lo: usize, hi: usize) -> f64 {
        let len = hi - lo + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let w = 1 << level;
        self.levels[level][lo].min(self.levels[level][hi + 1 - w])
    }
}

/// Tree coded by `h` at the given times: `d(x, y) = h(x) + h(y) - 2 min_{[x,y]} h`,
/// each point carrying the Lebesgue measure of its nearest-time cell.
pub fn rtree_from_excursion(h: &MarkedExcursion, times: &[f64]) -> Result<FiniteMms> {
    let zeta = h.zeta();
    if times.is_empty() {
        return Err(arg("need at least one sample time"));
    }
    if times.iter().any(|&t| !(t >= 0.0 && t <= zeta * (1.0 + 1e-12) + 1e-12)) {
        return Err(arg("sample time outside the excursion"));
    }
    let values = h.values();
    let rmq = RangeMin::new(values);
    let dt = h.dt();
    let k = times.len();
    let hv: Vec<f64> = times.iter().map(|&t| h.value_at(t)).collect();
    let last = values.len() - 1;
    let cell = |t: f64| ((t / dt + 1e-9).floor() as usize).min(last);
    let mut dist = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..i {
            let (a, b) = if times[i] <= times[j] { (i, j) } else { (j, i) };
            let (ta, tb) = (times[a], times[b]);
            let mut low = hv[a].min(hv[b]);
            match h.interpolation() {
                Interpolation::Step => low = low.min(rmq.min(cell(ta), cell(tb))),
                Interpolation::Linear => {
                    let lo = (ta / dt).floor() as usize + 1;
                    let hi = ((tb / dt).ceil() as usize).saturating_sub(1).min(last);
                    if lo <= hi {
                        low = low.min(rmq.min(lo, hi));
                    }
                }
            }
            let d = (hv[a] + hv[b] - 2.0 * low).max(0.0);
            dist[i * k + j] = d;
            dist[j * k + i] = d;
        }
    }
    FiniteMms::new(dist, voronoi_masses(times, zeta))?.with_times(times.to_vec())
}

/// Lebesgue measure of each time's nearest-point cell in `[0, zeta]`.
pub fn voronoi_masses(times: &[f64], zeta: f64) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..times.len()).collect();
    idx.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut mass = vec![0.0; times.len()];
    for (r, &i) in idx.iter().enumerate() {
        let lo = if r == 0 { 0.0 } else { (times[idx[r - 1]] + times[i]) / 2.0 };
        let hi = if r + 1 == idx.len() { zeta } else { (times[i] + times[idx[r + 1]]) / 2.0 };
        mass[i] = (hi - lo).max(0.0);
    }
    mass
}

/// Quotient by the identified pairs: distances become shortest paths that may
/// jump across identified pairs at no cost, and each class keeps the first of
/// its points with the class mass.
pub fn identify_pairs(space: &FiniteMms, pairs: &[(usize, usize)]) -> Result<FiniteMms> {
    let k = space.len();
    if pairs.iter().any(|&(a, b)| a >= k || b >= k) {
        return Err(arg("pair index out of range"));
    }
    let mut portals: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    portals.sort_unstable();
    portals.dedup();
    let p = portals.len();
    let slot = |v: usize| portals.binary_search(&v).unwrap();

    let mut pd = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            pd[i * p + j] = space.d(portals[i], portals[j]);
        }
    }
    for &(a, b) in pairs {
        let (i, j) = (slot(a), slot(b));
        pd[i * p + j] = 0.0;
        pd[j * p + i] = 0.0;
    }
    for m in 0..p {
        for i in 0..p {
            for j in 0..p {
                let via = pd[i * p + m] + pd[m * p + j];
                if via < pd[i * p + j] {
                    pd[i * p + j] = via;
                }
            }
        }
    }
    // reach[x][b] = min_a d(x, a) + D(a, b)
    let mut reach = vec![f64::INFINITY; k * p];
    for x in 0..k {
        for a in 0..p {
            let dxa = space.d(x, portals[a]);
            for b in 0..p {
                let v = dxa + pd[a * p + b];
                if v < reach[x * p + b] {
                    reach[x * p + b] = v;
                }
            }
        }
    }

    let mut parent: Vec<usize> = (0..k).collect();
    fn root(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for &(a, b) in pairs {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let reps: Vec<usize> = (0..k).filter(|&v| root(&mut parent, v) == v).collect();
    let mut class_of = vec![0usize; k];
    let mut mass = vec![0.0; reps.len()];
    for v in 0..k {
        let r = root(&mut parent, v);
        class_of[v] = reps.binary_search(&r).unwrap();
        mass[class_of[v]] += space.mass[v];
    }

    let q = reps.len();
    let mut dist = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..i {
            let (x, y) = (reps[i], reps[j]);
            let mut d = space.d(x, y);
            for b in 0..p {
                d = d.min(reach[x * p + b] + space.d(portals[b], y));
            }
            dist[i * q + j] = d;
            dist[j * q + i] = d;
        }
    }
    let out = FiniteMms::new(dist, mass)?;
    match &space.times {
        Some(t) => out.with_times(reps.iter().map(|&r| t[r]).collect()),
        None => Ok(out),
    }
}

fn bfs(adj: &[Vec<usize>], sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Graph distances scaled by `n^{-(α-1)/(α+1)}` and unit masses by
/// `n^{-α/(α+1)}`. With a cap, a uniform subset of vertices is kept and every
/// vertex's mass goes to its nearest kept vertex.
pub fn graph_component_to_mms<R: Rng + ?Sized>(
    vertices: &[usize],
    edges: &[(usize, usize)],
    n: usize,
    alpha: f64,
    cap: Option<usize>,
    rng: &mut R,
) -> Result<FiniteMms> {
    if vertices.is_empty() {
        return Err(arg("empty component"));
    }
    let mut local: Vec<(usize, usize)> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    local.sort_unstable();
    let find = |v: usize| local.binary_search_by_key(&v, |p| p.0).map(|i| local[i].1);
    let mut adj = vec![Vec::new(); vertices.len()];
    for &(a, b) in edges {
        let (Ok(i), Ok(j)) = (find(a), find(b)) else {
            return Err(arg("edge leaves the component"));
        };
        adj[i].push(j);
        adj[j].push(i);
    }
    if bfs(&adj, &[0]).contains(&usize::MAX) {
        return Err(arg("component is disconnected"));
    }
    let kept: Vec<usize> = match cap {
        Some(c) if c < vertices.len() => {
            let mut s = sample_indices(rng, vertices.len(), c.max(1)).into_vec();
            s.sort_unstable();
            s
        }
        _ => (0..vertices.len()).collect(),
    };
    let nf = n as f64;
    let d_scale = nf.powf(-(alpha - 1.0) / (alpha + 1.0));
    let m_scale = nf.powf(-alpha / (alpha + 1.0));
    let k = kept.len();
    let mut dist = vec![0.0; k * k];
    let mut best = vec![(usize::MAX, 0usize); vertices.len()];
    for (i, &s) in kept.iter().enumerate() {
        let from = bfs(&adj, &[s]);
        for (j, &t) in kept.iter().enumerate() {
            dist[i * k + j] = from[t] as f64 * d_scale;
        }
        for (v, &d) in from.iter().enumerate() {
            if d < best[v].0 {
                best[v] = (d, i);
            }
        }
    }
    let mut mass = vec![0.0; k];
    for &(_, i) in &best {
        mass[i] += m_scale;
    }
    FiniteMms::new(dist, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn tent() -> MarkedExcursion {
        MarkedExcursion::new(vec![0.0, 1.0, 0.0], 1.0, Interpolation::Linear).unwrap()
    }

    #[test]
    fn tent_distances() {
        let s = rtree_from_excursion(&tent(), &[0.0, 0.5, 1.0, 1.5]).unwrap();
        assert!(s.d(1, 3).abs() < 1e-12);
        assert!((s.d(1, 2) - 0.5).abs() < 1e-12);
        assert!((s.d(0, 2) - 1.0).abs() < 1e-12);
        assert!((s.total_mass() - 2.0).abs() < 1e-12);
        let zero = MarkedExcursion::new(vec![0.0; 4], 1.0, Interpolation::Step).unwrap();
        assert_eq!(rtree_from_excursion(&zero, &[0.0, 1.0, 2.5]).unwrap().diameter(), 0.0);
    }

    #[test]
    fn identification_examples() {
        let line = FiniteMms::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]], vec![1.0; 3]).unwrap();
        assert_eq!(identify_pairs(&line, &[(1, 1)]).unwrap(), line);
        let q = identify_pairs(&line, &[(0, 2)]).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.d(0, 1), 1.0);
        assert_eq!(q.masses(), &[2.0, 1.0]);
        let two = FiniteMms::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]], vec![0.5, 0.25]).unwrap();
        let one = identify_pairs(&two, &[(0, 1)]).unwrap();
        assert_eq!((one.len(), one.masses()[0]), (1, 0.75));
    }

    #[test]
    fn graph_examples() {
        let mut rng = Stream::new(1);
        let (n, a) = (1000usize, 1.5f64);
        let ds = (n as f64).powf(-(a - 1.0) / (a + 1.0));
        let ms = (n as f64).powf(-a / (a + 1.0));
        let s = graph_component_to_mms(&[4, 9], &[(4, 9)], n, a, None, &mut rng).unwrap();
        assert!((s.d(0, 1) - ds).abs() < 1e-12 && (s.masses()[0] - ms).abs() < 1e-12);
        let s = graph_component_to_mms(&[3], &[(3, 3)], n, a, None, &mut rng).unwrap();
        assert_eq!((s.len(), s.diameter()), (1, 0.0));
        let s = graph_component_to_mms(&[0, 1, 2, 3], &[(0, 1), (1, 2), (2, 3)], n, a, None, &mut rng).unwrap();
        assert!((s.d(0, 3) - 3.0 * ds).abs() < 1e-12 && (s.d(1, 3) - 2.0 * ds).abs() < 1e-12);
        assert!(graph_component_to_mms(&[0, 1], &[], n, a, None, &mut rng).is_err());
        let capped = graph_component_to_mms(&[0, 1, 2, 3], &[(0, 1), (1, 2), (2, 3)], n, a, Some(2), &mut rng).unwrap();
        assert_eq!(capped.len(), 2);
        assert!((capped.total_mass() - 4.0 * ms).abs() < 1e-12);
    }

    #[test]
    fn file_round_trip() {
        let s = FiniteMms::from_rows(&[vec![0.0, 1.5], vec![1.5, 0.0]], vec![0.25, 0.75]).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        assert_eq!(FiniteMms::read(buf.as_slice()).unwrap(), s);
        assert!(matches!(FiniteMms::read("k=2\n1\n".as_bytes()), Err(Error::Parse { .. })));
    }
}
