//! Gromov–Hausdorff–Prokhorov comparisons of finite measured metric spaces.
//!
//! For a correspondence `C` and a sub-coupling `π` the objective is
//! `max{dis(C)/2, D(π), π(Cᶜ)}` with `D(π) = |μ| + |μ'| - 2|π|`. Small spaces
//! are solved exactly: only maximal correspondences at each distortion level
//! matter, and those are the maximal cliques of a compatibility graph; the
//! best coupling for a fixed correspondence is a linear program.

use std::collections::HashMap;

use rand::Rng;

use super::FiniteMms;
use crate::coding_paths::MarkedExcursion;
use crate::error::{arg, Result};
use crate::rng::Stream;
use crate::simplex;

/// Largest point count for which [`ghp_estimate`] runs the exact search.
pub const EXACT_GHP_MAX_POINTS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhpEstimate {
    pub value: f64,
    pub exact: bool,
    pub evaluations: usize,
}

/// `2 max{ sup|h-g| on the common domain, overhang sups, |ζ_h-ζ_g|/2 }`.
pub fn ghp_upper_bound_trees(h: &MarkedExcursion, g: &MarkedExcursion) -> f64 {
    let (zh, zg) = (h.zeta(), g.zeta());
    let common = zh.min(zg);
    let mut times: Vec<f64> = (0..h.values().len())
        .map(|i| i as f64 * h.dt())
        .chain((0..g.values().len()).map(|i| i as f64 * g.dt()))
        .collect();
    times.sort_by(f64::total_cmp);
    let mut sup = 0.0f64;
    let (mut over_h, mut over_g) = (0.0f64, 0.0f64);
    for &t in &times {
        if t <= common {
            sup = sup.max((h.value_at(t) - g.value_at(t)).abs());
        }
        if t >= common {
            if t <= zh {
                over_h = over_h.max(h.value_at(t));
            }
            if t <= zg {
                over_g = over_g.max(g.value_at(t));
            }
        }
    }
    2.0 * sup.max(over_h + over_g).max((zh - zg).abs() / 2.0)
}

/// Distortion of a relation given as a list of pairs.
fn distortion(a: &FiniteMms, b: &FiniteMms, rel: &[(usize, usize)]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &(x, y)) in rel.iter().enumerate() {
        for &(x2, y2) in &rel[..i] {
            worst = worst.max((a.d(x, x2) - b.d(y, y2)).abs());
        }
    }
    worst
}

/// Smallest `max{D(π), π(Cᶜ)}` over sub-couplings, `C` given as a membership
/// mask on `a.len() × b.len()` cells.
fn coupling_cost(a: &FiniteMms, b: &FiniteMms, inside: &[bool]) -> f64 {
    let (ka, kb) = (a.len(), b.len());
    let cells = ka * kb;
    let t_max = a.total_mass() + b.total_mass();
    let n = cells + 1;
    let mut rows = Vec::with_capacity(3 + ka + kb);
    let mut rhs = Vec::with_capacity(3 + ka + kb);
    let mut r = vec![-2.0; n];
    r[cells] = 1.0;
    rows.push(r);
    rhs.push(0.0);
    let mut r: Vec<f64> = (0..cells).map(|c| if inside[c] { 0.0 } else { 1.0 }).collect();
    r.push(1.0);
    rows.push(r);
    rhs.push(t_max);
    let mut r = vec![0.0; n];
    r[cells] = 1.0;
    rows.push(r);
    rhs.push(t_max);
    for i in 0..ka {
        let mut r = vec![0.0; n];
        r[i * kb..(i + 1) * kb].fill(1.0);
        rows.push(r);
        rhs.push(a.masses()[i]);
    }
    for j in 0..kb {
        let mut r = vec![0.0; n];
        for i in 0..ka {
            r[i * kb + j] = 1.0;
        }
        rows.push(r);
        rhs.push(b.masses()[j]);
    }
    let mut c = vec![0.0; n];
    c[cells] = 1.0;
    (t_max - simplex::maximize(&c, &rows, &rhs).value).max(0.0)
}

fn bron_kerbosch(r: u64, mut p: u64, mut x: u64, adj: &[u64], out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let px = p | x;
    let pivot = (0..adj.len()).filter(|&u| px >> u & 1 == 1).max_by_key(|&u| (adj[u] & p).count_ones()).unwrap();
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        cand &= !bit;
        bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
        p &= !bit;
        x |= bit;
    }
}

/// Exact GHP distance for spaces with at most `a.len() * b.len() ≤ 64` cells.
pub fn ghp_exact(a: &FiniteMms, b: &FiniteMms) -> Result<GhpEstimate> {
    if a.is_empty() || b.is_empty() {
        return Err(arg("GHP distance needs non-empty spaces"));
    }
    let (ka, kb) = (a.len(), b.len());
    let cells = ka * kb;
    if cells > 64 {
        return Err(arg("exact GHP search is limited to 64 cells"));
    }
    let gap = |u: usize, v: usize| (a.d(u / kb, v / kb) - b.d(u % kb, v % kb)).abs();
    let mut levels: Vec<f64> = (0..cells).flat_map(|u| (0..u).map(move |v| (u, v))).map(|(u, v)| gap(u, v)).collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let full_row = (1u64 << kb) - 1;
    let covers = |mask: u64| {
        let mut rows = 0usize;
        let mut cols = 0u64;
        for i in 0..ka {
            let row = (mask >> (i * kb)) & full_row;
            if row != 0 {
                rows += 1;
            }
            cols |= row;
        }
        rows == ka && cols == full_row
    };
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut best = f64::INFINITY;
    let mut evaluations = 0;
    for &delta in &levels {
        if delta / 2.0 >= best {
            break;
        }
        let adj: Vec<u64> = (0..cells)
            .map(|u| (0..cells).filter(|&v| v != u && gap(u, v) <= delta).fold(0u64, |m, v| m | 1 << v))
            .collect();
        let mut cliques = Vec::new();
        let all = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
        bron_kerbosch(0, all, 0, &adj, &mut cliques);
        for mask in cliques.into_iter().filter(|&m| covers(m)) {
            let cost = *cache.entry(mask).or_insert_with(|| {
                evaluations += 1;
                let inside: Vec<bool> = (0..cells).map(|c| mask >> c & 1 == 1).collect();
                coupling_cost(a, b, &inside)
            });
            best = best.min(cost.max(delta / 2.0));
        }
    }
    Ok(GhpEstimate { value: best, exact: true, evaluations })
}

/// North-west corner coupling along two orders, as `(x, y, flow)` cells.
/// Every point appears in some cell, so the cells form a correspondence.
fn staircase(a: &FiniteMms, b: &FiniteMms, oa: &[usize], ob: &[usize]) -> Vec<(usize, usize, f64)> {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.masses()[oa[0]], b.masses()[ob[0]]);
    let mut cells = Vec::with_capacity(oa.len() + ob.len());
    loop {
        let f = ra.min(rb);
        cells.push((oa[i], ob[j], f));
        ra -= f;
        rb -= f;
        let (end_a, end_b) = (i + 1 == oa.len(), j + 1 == ob.len());
        if end_a && end_b {
            break;
        }
        let tie = ra.max(rb) <= 1e-15 * (a.total_mass() + b.total_mass());
        if tie && !end_a && !end_b {
            i += 1;
            j += 1;
            ra = a.masses()[oa[i]];
            rb = b.masses()[ob[j]];
        } else if (ra <= rb && !end_a) || end_b {
            i += 1;
            ra = a.masses()[oa[i]];
        } else {
            j += 1;
            rb = b.masses()[ob[j]];
        }
    }
    cells
}

fn discrepancy(a: &FiniteMms, b: &FiniteMms, cells: &[(usize, usize, f64)]) -> f64 {
    let moved: f64 = cells.iter().map(|c| c.2).sum();
    (a.total_mass() + b.total_mass() - 2.0 * moved).max(0.0)
}

fn staircase_cost(a: &FiniteMms, b: &FiniteMms, oa: &[usize], ob: &[usize]) -> f64 {
    let cells = staircase(a, b, oa, ob);
    let support: Vec<(usize, usize)> = cells.iter().map(|c| (c.0, c.1)).collect();
    (distortion(a, b, &support) / 2.0).max(discrepancy(a, b, &cells))
}

fn nearest_time(sorted: &[(f64, usize)], t: f64) -> usize {
    let p = sorted.partition_point(|&(s, _)| s < t);
    let cand = [p.saturating_sub(1), p.min(sorted.len() - 1)];
    *cand.iter().min_by(|&&x, &&y| (sorted[x].0 - t).abs().total_cmp(&(sorted[y].0 - t).abs()).then(x.cmp(&y))).map(|&x| &sorted[x].1).unwrap()
}

/// Correspondence pairing every point with the point of nearest coding time,
/// coupled by the time-ordered staircase.
fn time_aligned_cost(a: &FiniteMms, b: &FiniteMms, ta: &[f64], tb: &[f64]) -> f64 {
    let mut sa: Vec<(f64, usize)> = ta.iter().copied().zip(0..).collect();
    let mut sb: Vec<(f64, usize)> = tb.iter().copied().zip(0..).collect();
    sa.sort_by(|x, y| x.0.total_cmp(&y.0));
    sb.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rel: Vec<(usize, usize)> = (0..a.len()).map(|x| (x, nearest_time(&sb, ta[x]))).collect();
    rel.extend((0..b.len()).map(|y| (nearest_time(&sa, tb[y]), y)));
    rel.sort_unstable();
    rel.dedup();
    let oa: Vec<usize> = sa.iter().map(|p| p.1).collect();
    let ob: Vec<usize> = sb.iter().map(|p| p.1).collect();
    let cells = staircase(a, b, &oa, &ob);
    let disc = discrepancy(a, b, &cells);
    let kb = b.len();
    let mut inside = vec![false; a.len() * kb];
    for &(x, y) in &rel {
        inside[x * kb + y] = true;
    }
    let outside: f64 = cells.iter().filter(|c| !inside[c.0 * kb + c.1]).map(|c| c.2).sum();
    let plain = (distortion(a, b, &rel) / 2.0).max(disc).max(outside);
    let mut merged = rel;
    merged.extend(cells.iter().map(|c| (c.0, c.1)));
    merged.sort_unstable();
    merged.dedup();
    plain.min((distortion(a, b, &merged) / 2.0).max(disc))
}

/// Orders used to seed the staircase search.
fn seed_orders(s: &FiniteMms) -> Vec<Vec<usize>> {
    let k = s.len();
    let mut orders = Vec::new();
    if let Some(t) = s.times() {
        let mut o: Vec<usize> = (0..k).collect();
        o.sort_by(|&x, &y| t[x].total_cmp(&t[y]));
        orders.push(o);
    }
    let mean: Vec<f64> = (0..k).map(|i| (0..k).map(|j| s.d(i, j) * s.masses()[j]).sum()).collect();
    let mut o: Vec<usize> = (0..k).collect();
    o.sort_by(|&x, &y| mean[x].total_cmp(&mean[y]).then(x.cmp(&y)));
    let centre = o[0];
    orders.push(o);
    let mut o: Vec<usize> = (0..k).collect();
    o.sort_by(|&x, &y| s.d(centre, x).total_cmp(&s.d(centre, y)).then(x.cmp(&y)));
    orders.push(o);
    let far = (0..k).max_by(|&x, &y| s.d(centre, x).total_cmp(&s.d(centre, y))).unwrap();
    let mut o: Vec<usize> = (0..k).collect();
    o.sort_by(|&x, &y| s.d(far, x).total_cmp(&s.d(far, y)).then(x.cmp(&y)));
    orders.push(o);
    orders
}

/// Upper estimate of the GHP distance. Spaces with at most
/// [`EXACT_GHP_MAX_POINTS`] points on both sides are solved exactly; larger
/// ones get the best staircase coupling found from several seed orders and
/// a local search of at most `budget` further evaluations.
pub fn ghp_estimate(a: &FiniteMms, b: &FiniteMms, budget: usize) -> Result<GhpEstimate> {
    if a.is_empty() || b.is_empty() {
        return Err(arg("GHP distance needs non-empty spaces"));
    }
    if a.len().max(b.len()) <= EXACT_GHP_MAX_POINTS {
        return ghp_exact(a, b);
    }
    let mut evaluations = 0;
    let mut best = f64::INFINITY;
    if let (Some(ta), Some(tb)) = (a.times(), b.times()) {
        best = time_aligned_cost(a, b, ta, tb);
        evaluations += 1;
    }
    let (seeds_a, seeds_b) = (seed_orders(a), seed_orders(b));
    let mut best_orders = (seeds_a[0].clone(), seeds_b[0].clone());
    let mut best_stair = f64::INFINITY;
    for (oa, ob) in seeds_a.iter().zip(&seeds_b) {
        let c = staircase_cost(a, b, oa, ob);
        evaluations += 1;
        if c < best_stair {
            best_stair = c;
            best_orders = (oa.clone(), ob.clone());
        }
    }
    let mut rng = Stream::new(0x0067_6870);
    for _ in 0..budget {
        let (mut oa, mut ob) = best_orders.clone();
        let side = if rng.random::<bool>() { &mut oa } else { &mut ob };
        if side.len() < 2 {
            continue;
        }
        let i = rng.random_range(0..side.len() - 1);
        side.swap(i, i + 1);
        let c = staircase_cost(a, b, &oa, &ob);
        evaluations += 1;
        if c <= best_stair {
            best_stair = c;
            best_orders = (oa, ob);
        }
    }
    Ok(GhpEstimate { value: best.min(best_stair), exact: false, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding_paths::Interpolation;

    fn pts(rows: &[Vec<f64>], mass: Vec<f64>) -> FiniteMms {
        FiniteMms::from_rows(rows, mass).unwrap()
    }

    /// Exhaustive search over every relation, with the coupling LP for each.
    fn brute_force(a: &FiniteMms, b: &FiniteMms) -> f64 {
        let (ka, kb) = (a.len(), b.len());
        let cells = ka * kb;
        let mut best = f64::INFINITY;
        for mask in 1u64..(1u64 << cells) {
            let rel: Vec<(usize, usize)> = (0..cells).filter(|&c| mask >> c & 1 == 1).map(|c| (c / kb, c % kb)).collect();
            let rows: std::collections::HashSet<usize> = rel.iter().map(|p| p.0).collect();
            let cols: std::collections::HashSet<usize> = rel.iter().map(|p| p.1).collect();
            if rows.len() < ka || cols.len() < kb {
                continue;
            }
            let dis = distortion(a, b, &rel) / 2.0;
            if dis >= best {
                continue;
            }
            let inside: Vec<bool> = (0..cells).map(|c| mask >> c & 1 == 1).collect();
            best = best.min(dis.max(coupling_cost(a, b, &inside)));
        }
        best
    }

    #[test]
    fn identical_and_single_points() {
        let a = pts(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]], vec![0.2, 0.3, 0.5]);
        assert!(ghp_estimate(&a, &a, 10).unwrap().value.abs() < 1e-12);
        let x: Vec<f64> = (0..20).map(|i| ((i * 7) % 20) as f64).collect();
        let rows: Vec<Vec<f64>> = x.iter().map(|&u| x.iter().map(|&v| (u - v).abs()).collect()).collect();
        let big = pts(&rows, vec![0.05; 20]);
        let est = ghp_estimate(&big, &big, 0).unwrap();
        assert!(!est.exact && est.value.abs() < 1e-12);
        let p = pts(&[vec![0.0]], vec![0.7]);
        let q = pts(&[vec![0.0]], vec![0.2]);
        assert!((ghp_estimate(&p, &q, 10).unwrap().value - 0.5).abs() < 1e-12);
        assert!(ghp_estimate(&p, &FiniteMms::new(vec![], vec![]).unwrap(), 1).is_err());
    }

    #[test]
    fn two_point_spaces() {
        let a = pts(&[vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 1.0]);
        let b = pts(&[vec![0.0, 1.6], vec![1.6, 0.0]], vec![1.0, 1.0]);
        let v = ghp_estimate(&a, &b, 0).unwrap().value;
        assert!((v - 0.3).abs() < 1e-12);
        assert!((brute_force(&a, &b) - v).abs() < 1e-12);
    }

    #[test]
    fn clique_search_matches_brute_force() {
        let mut rng = Stream::new(7);
        let mut random_space = |k: usize| {
            // Points on a line keep the metric valid.
            let x: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let rows: Vec<Vec<f64>> = x.iter().map(|&u| x.iter().map(|&v| (u - v).abs()).collect()).collect();
            let mass: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 0.5).collect();
            pts(&rows, mass)
        };
        for (ka, kb) in [(1, 3), (2, 2), (2, 3), (3, 3), (3, 4)] {
            for _ in 0..4 {
                let (a, b) = (random_space(ka), random_space(kb));
                let fast = ghp_exact(&a, &b).unwrap().value;
                let slow = brute_force(&a, &b);
                assert!((fast - slow).abs() < 1e-9, "{ka}x{kb}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn tree_bound_examples() {
        let h = MarkedExcursion::new(vec![0.0, 1.0, 2.0, 1.0, 0.0], 0.5, Interpolation::Linear).unwrap();
        assert_eq!(ghp_upper_bound_trees(&h, &h), 0.0);
        let lifted = MarkedExcursion::new(vec![0.1, 1.1, 2.1, 1.1, 0.1], 0.5, Interpolation::Linear).unwrap();
        assert!((ghp_upper_bound_trees(&h, &lifted) - 0.2).abs() < 1e-12);
        let longer = MarkedExcursion::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 0.3, 0.0], 0.5, Interpolation::Linear).unwrap();
        assert!((ghp_upper_bound_trees(&h, &longer) - 2.0 * 0.5f64.max(0.3)).abs() < 1e-12);
    }
}
