use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng;
use stable_graph::coding_paths::{excursions_above_min, ord_desc, sbpp_sample, Interpolation, MarkedExcursion};
use stable_graph::config_explorer::{coupled_height_blocks, explore, first_invariant_violation, pair_half_edges, ExploreOptions};
use stable_graph::degree_model::{
    make_critical_power_law, phi_weight, size_biased_reorder, DegreeLaw, DegreeSequence, PhiMode,
};
use stable_graph::levy_sim::{simulate_tilted, LevyParams, TiltMethod};
use stable_graph::Stream;

fn two_atom() -> DegreeLaw {
    DegreeLaw::finite(&[(1, 0.75), (3, 0.25)]).unwrap()
}

#[test]
fn size_biased_prefix_matches_product_formula() {
    let law = two_atom();
    let n = 6;
    let draws = 40_000;
    let mut rng = Stream::new(61);
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for _ in 0..draws {
        let seq = DegreeSequence::from_draws((0..n).map(|_| law.sample(&mut rng)).collect()).unwrap();
        let d = size_biased_reorder(&seq, &mut rng);
        *counts.entry((d.degrees()[0], d.degrees()[1])).or_default() += 1;
    }
    let mut tv = 0.0;
    for a in [1, 3] {
        for b in [1, 3] {
            let k = [a, b];
            let base: f64 = k.iter().map(|&d| d as f64 * law.prob(d) / law.mu()).product();
            let exact = base * phi_weight(n, &k, &law, PhiMode::exact(), &mut rng).unwrap().value;
            let emp = counts.get(&(a, b)).copied().unwrap_or(0) as f64 / draws as f64;
            tv += (exact - emp).abs() / 2.0;
        }
    }
    assert!(tv < 0.05, "total variation {tv}");
}

#[test]
fn four_single_stubs_pair_uniformly() {
    let seq = DegreeSequence::new(vec![1, 1, 1, 1]).unwrap();
    let mut rng = Stream::new(62);
    let trials = 30_000;
    let hits = (0..trials)
        .filter(|_| {
            let g = pair_half_edges(&seq, &mut rng).unwrap();
            g.edges().iter().any(|&(a, b)| (a.min(b), a.max(b)) == (0, 1))
        })
        .count();
    let p = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((p - 1.0 / 3.0).abs() < 3.0 * se, "{p}");
}

#[test]
fn tilted_stable_mean_tracks_drift() {
    let law = make_critical_power_law(1.5, 3).unwrap();
    let p = LevyParams::stable(1.5, law.c(), law.mu()).unwrap();
    let base = Stream::new(63);
    let ends: Vec<f64> = (0..4000)
        .map(|i| {
            let path = simulate_tilted(&p, 1.0, 1.0 / 128.0, &mut base.split(i), TiltMethod::Direct { eps_cut: None }).unwrap();
            *path.values.last().unwrap()
        })
        .collect();
    let n = ends.len() as f64;
    let m = ends.iter().sum::<f64>() / n;
    let se = (ends.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    assert!((m - p.drift(1.0)).abs() < 4.0 * se + 0.02, "{m} vs {}", p.drift(1.0));
}

#[test]
fn explorations_satisfy_their_invariants() {
    let law = make_critical_power_law(1.5, 3).unwrap();
    for seed in 0..5 {
        let mut rng = Stream::new(seed);
        let seq = stable_graph::degree_model::sample_degrees(&law, 5_000, &mut rng).unwrap();
        let ex = explore(&seq, &mut rng, ExploreOptions::default());
        assert_eq!(first_invariant_violation(&ex), None);
        let sizes: usize = ex.components.iter().map(|c| c.size).sum();
        assert_eq!(sizes, 5_000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sbpp_orders_by_arrival(y in prop::collection::vec(0.01f64..10.0, 1..40), seed in any::<u64>()) {
        let points = sbpp_sample(&y, &mut Stream::new(seed)).unwrap();
        let mut seen: Vec<usize> = points.iter().map(|p| p.index).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..y.len()).collect::<Vec<_>>());
        let mut acc = 0.0;
        for p in &points {
            prop_assert!((p.sigma - acc).abs() <= 1e-9 * (1.0 + acc));
            prop_assert_eq!(p.y, y[p.index]);
            acc += p.y;
        }
    }

    #[test]
    fn ord_desc_is_idempotent(v in prop::collection::vec(0u32..50, 0..60)) {
        let idx = ord_desc(&v);
        let sorted: Vec<u32> = idx.iter().map(|&i| v[i]).collect();
        prop_assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(ord_desc(&sorted), (0..v.len()).collect::<Vec<_>>());
    }

    #[test]
    fn excursions_partition_the_path(steps in prop::collection::vec(-3i32..3, 1..200)) {
        let mut path = vec![0.0];
        for s in &steps {
            path.push(path.last().unwrap() + *s as f64);
        }
        let ex = excursions_above_min(&path, 1.0, Interpolation::Step).unwrap();
        let mut next = 0;
        for e in &ex {
            prop_assert_eq!(e.start, next);
            prop_assert!(e.excursion.values().iter().all(|&v| v >= 0.0));
            next = e.start + e.len();
        }
        if !ex.is_empty() {
            prop_assert_eq!(next, path.len() - 1);
        }
    }

    #[test]
    fn close_time_is_monotone(values in prop::collection::vec(0.0f64..5.0, 2..60), s_frac in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let mut values = values;
        values[0] = 0.0;
        *values.last_mut().unwrap() = 0.0;
        let e = MarkedExcursion::new(values, 0.5, Interpolation::Linear).unwrap();
        let s = s_frac * e.zeta();
        let here = e.value_at(s);
        let (lo, hi) = (a.min(b) * here, a.max(b) * here);
        let (t_lo, t_hi) = (e.close_time(s, lo).unwrap(), e.close_time(s, hi).unwrap());
        prop_assert!(s <= t_hi && t_hi <= t_lo && t_lo <= e.zeta());
        prop_assert!(e.value_at(t_lo) <= lo + 1e-9);
    }

    #[test]
    fn height_blocks_stay_within_tree_bound(n in 2usize..150, seed in any::<u64>()) {
        let law = make_critical_power_law(1.5, 3).unwrap();
        let mut rng = Stream::new(seed);
        let seq = stable_graph::degree_model::sample_degrees(&law, n, &mut rng).unwrap();
        let ex = explore(&seq, &mut rng, ExploreOptions::default());
        for b in coupled_height_blocks(&ex).unwrap() {
            prop_assert!(b.gap <= b.bound, "{:?}", b);
        }
    }

    #[test]
    fn stream_splits_are_reproducible(seed in any::<u64>(), i in 0u64..1000) {
        let base = Stream::new(seed);
        let a: u64 = base.split(i).random();
        let b: u64 = base.split(i).random();
        prop_assert_eq!(a, b);
    }
}
