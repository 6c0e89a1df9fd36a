//! Invariants checked on random inputs against direct reference computations.

use awplab::exact::{verify_witness, Provenance, WitnessPath};
use awplab::exploration::{block_exploration, explore_step, run_exploration, ExplorationState};
use awplab::graph::EdgeOracle;
use awplab::nbrw::{offspring, select_leftmost, Population};
use awplab::rng::{coupled_order_stats, lazy_order_stat_stream, SeededStream};
use awplab::walk::{drop_count, WalkTrace};
use proptest::prelude::*;

fn drop_count_brute(values: &[f64], delta: f64) -> usize {
    (0..values.len()).filter(|&j| values[j..].iter().any(|&y| y <= values[j] - delta)).count()
}

/// Selected extensions from a full scan of every `(active, candidate)` pair.
fn full_scan_step(oracle: &EdgeOracle, active: &[(usize, f64)], removed: &[bool], keep: usize) -> Vec<(usize, f64)> {
    let n = oracle.n();
    let blocked: Vec<bool> = (0..=n).map(|v| removed[v] || active.iter().any(|a| a.0 == v)).collect();
    let mut ext: Vec<(f64, usize, usize)> = Vec::new();
    for (idx, &(u, vu)) in active.iter().enumerate() {
        for v in 1..=n {
            if !blocked[v] {
                ext.push((vu + oracle.edge_weight(u, v).unwrap(), idx, v));
            }
        }
    }
    ext.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut next: Vec<(usize, f64)> = Vec::new();
    for &(sum, _, v) in ext.iter().take(keep) {
        if !next.iter().any(|x| x.0 == v) {
            next.push((v, sum));
        }
    }
    next.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    next
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drop_count_matches_brute_force(values in prop::collection::vec(-5.0f64..5.0, 0..200), delta in 0.01f64..4.0) {
        let trace = WalkTrace { values: values.clone() };
        prop_assert_eq!(drop_count(&trace, delta), drop_count_brute(&values, delta));
    }

    #[test]
    fn selection_equals_sorted_union(
        positions in prop::collection::vec(-3.0f64..3.0, 1..12),
        keep in 1usize..40,
        seed in any::<u64>(),
    ) {
        let s = SeededStream::new(seed, 1);
        let parents = Population::initial(&positions);
        let top = parents.particles.last().unwrap().position;
        let cutoff = top + std::f64::consts::E * (2 * keep + 20) as f64;
        let mut all: Vec<f64> = parents
            .particles
            .iter()
            .enumerate()
            .flat_map(|(rank, p)| offspring(p.position, cutoff, s.substream2(0, rank as u64)))
            .collect();
        prop_assume!(all.len() >= keep);
        all.sort_by(f64::total_cmp);
        all.truncate(keep);
        let step = select_leftmost(&parents, keep, &s).unwrap();
        prop_assert_eq!(step.population.positions(), all);
    }

    #[test]
    fn offspring_cutoff_is_neutral(p in -5.0f64..5.0, c1 in -2.0f64..10.0, extra in 0.0f64..20.0, seed in any::<u64>()) {
        let s = SeededStream::new(seed, 2);
        let short = offspring(p, c1, s.clone());
        let long = offspring(p, c1 + extra, s);
        prop_assert_eq!(&short[..], &long[..short.len()]);
        prop_assert!(long[short.len()..].iter().all(|&x| x > c1));
    }

    #[test]
    fn coupled_sandwich_and_identity(n in 2usize..3000, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let m = 1 + ((n - 2) as f64 * frac) as usize;
        let c = coupled_order_stats(&mut SeededStream::new(seed, 3), n, m).unwrap();
        prop_assert_eq!(c.sandwich_violations(), 0);
        prop_assert!(c.identity_error() < 1e-12);
        prop_assert!(c.x.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(c.t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lazy_order_stats_ascend_below_cutoff(n in 2usize..5000, pool in 1usize..500, cutoff in -1.0f64..50.0, seed in any::<u64>()) {
        let xs = lazy_order_stat_stream(SeededStream::new(seed, 4), n, pool, cutoff).unwrap();
        prop_assert!(xs.len() <= pool);
        prop_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(xs.iter().all(|&x| x > -1.0 && x <= cutoff));
    }

    #[test]
    fn exploration_matches_full_scan(n in 4usize..11, keep in 1usize..4, seed in any::<u64>()) {
        let steps = (n - 1) / keep;
        let mut oracle = EdgeOracle::materialized(n, &mut SeededStream::new(seed, 5)).unwrap();
        let reference = oracle.clone();
        let stream = SeededStream::new(seed, 6);
        let mut state = ExplorationState::new(n, &[1]).unwrap();
        let mut active = vec![(1usize, 0.0f64)];
        let mut removed = vec![false; n + 1];
        for _ in 0..steps {
            let expected = full_scan_step(&reference, &active, &removed, keep);
            explore_step(&mut state, keep, &mut oracle, &stream).unwrap();
            let got: Vec<(usize, f64)> = state.active.iter().map(|a| (a.vertex, a.weight)).collect();
            prop_assert_eq!(got.len(), expected.len());
            for (g, e) in got.iter().zip(&expected) {
                prop_assert_eq!(g.0, e.0);
                prop_assert!((g.1 - e.1).abs() < 1e-12);
            }
            for a in &active {
                removed[a.0] = true;
            }
            active = expected;
            if active.is_empty() {
                break;
            }
        }
    }

    #[test]
    fn exploration_paths_are_simple_and_exact(n in 50usize..400, keep in 1usize..8, seed in any::<u64>()) {
        let steps = ((n - 1) / keep).min(30);
        let mut oracle = EdgeOracle::lazy(n).unwrap();
        let start: Vec<usize> = (1..=keep).collect();
        let run = run_exploration(keep, steps, &start, &mut oracle, &SeededStream::new(seed, 7)).unwrap();
        let mut in_forest = vec![0usize; n + 1];
        for node in &run.state.forest.nodes {
            in_forest[node.vertex] += 1;
        }
        prop_assert!(in_forest.iter().all(|&c| c <= 1), "a vertex entered the forest twice");
        if let Some(w) = &run.best {
            prop_assert!(verify_witness(&oracle, w, w.average() + 1e-9).unwrap());
            let rebuilt = WitnessPath::from_vertices(&oracle, w.vertices.clone(), Provenance::Manual).unwrap();
            prop_assert!((rebuilt.total() - w.total()).abs() < 1e-9);
        }
    }

    #[test]
    fn block_spine_is_simple(n in 200usize..1500, keep in 2usize..6, delta in 2usize..8, seed in any::<u64>()) {
        prop_assume!(keep * delta < n);
        let mut oracle = EdgeOracle::lazy(n).unwrap();
        let target = (n - 1) / (4 * keep);
        let (spine, blocks) = block_exploration(delta, keep, target, 1, &mut oracle, &SeededStream::new(seed, 8)).unwrap();
        prop_assert!(verify_witness(&oracle, &spine, spine.average() + 1e-9).unwrap());
        prop_assert!((spine.total() - blocks.decomposed_weight()).abs() < 1e-9 * (1.0 + spine.total().abs()));
        prop_assert!(blocks.tau.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn replays_are_identical() {
    let run = |seed| {
        let mut oracle = EdgeOracle::lazy(500).unwrap();
        let r = run_exploration(5, 40, &[1, 2, 3], &mut oracle, &SeededStream::new(seed, 9)).unwrap();
        r.min_v().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}
