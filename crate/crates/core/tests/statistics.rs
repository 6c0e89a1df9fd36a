//! Distributional checks against closed forms and independent samplers.

use std::f64::consts::E;

use awplab::exploration::run_exploration;
use awplab::graph::EdgeOracle;
use awplab::nbrw::{many_to_one_check, nbrw_run, offspring, velocity, Brood};
use awplab::rng::{exp1, SeededStream};
use awplab::stats::{chi_square_gof, ks_one_sample, ks_two_sample, Moments};
use awplab::walk::{first_crossing_time, BoxEvent};
use statrs::distribution::{Discrete, Poisson};

/// Final `min V` of a short exploration, by oracle mode.
fn exploration_minima(lazy: bool, seeds: u64) -> Vec<f64> {
    (0..seeds)
        .map(|seed| {
            let n = 40;
            let mut oracle = if lazy {
                EdgeOracle::lazy(n).unwrap()
            } else {
                EdgeOracle::materialized(n, &mut SeededStream::new(seed, 100)).unwrap()
            };
            let run = run_exploration(3, 4, &[1, 2], &mut oracle, &SeededStream::new(seed, 101)).unwrap();
            *run.min_v().last().unwrap()
        })
        .collect()
}

#[test]
fn lazy_and_materialized_explorations_agree_in_law() {
    let mut lazy = exploration_minima(true, 3000);
    let mut full = exploration_minima(false, 3000);
    let (d, p) = ks_two_sample(&mut lazy, &mut full);
    assert!(p > 1e-3, "KS d = {d}, p = {p}");
}

#[test]
fn offspring_count_below_cutoff_is_poisson() {
    // atoms T ≤ (c + 1)/e land at or below c
    let c = 4.0;
    let mean = (c + 1.0) / E;
    let base = SeededStream::new(1, 0);
    let mut observed = vec![0u64; 12];
    let trials = 20_000u64;
    for t in 0..trials {
        let k = offspring(0.0, c, base.substream(t)).len().min(11);
        observed[k] += 1;
    }
    let poisson = Poisson::new(mean).unwrap();
    let mut expected: Vec<f64> = (0..11).map(|k| trials as f64 * poisson.pmf(k)).collect();
    expected.push(trials as f64 - expected.iter().sum::<f64>());
    let (chi2, p) = chi_square_gof(&observed, &expected);
    assert!(p > 1e-3, "chi2 = {chi2}, p = {p}");
}

#[test]
fn leftmost_child_law() {
    let base = SeededStream::new(2, 0);
    let mut mins: Vec<f64> = (0..20_000u64).map(|t| Brood::new(0.0, base.substream(t)).peek()).collect();
    let (d, p) = ks_one_sample(&mut mins, |x| if x <= -1.0 { 0.0 } else { 1.0 - (-(x + 1.0) / E).exp() });
    assert!(p > 1e-3, "KS d = {d}, p = {p}");
}

#[test]
fn single_survivor_drifts_at_e_minus_one() {
    let steps = 200;
    let m: Moments = (0..500u64)
        .map(|seed| nbrw_run(1, 1, steps, &SeededStream::new(seed, 3)).unwrap().final_min() / steps as f64)
        .collect();
    assert!((m.mean() - (E - 1.0)).abs() < 4.0 * m.sem(), "{} +- {}", m.mean(), m.sem());
}

#[test]
fn many_to_one_single_generation() {
    // P(Y_1 ≤ 0) = 1 − 1/e, Y_1 ≥ −1 always
    let event = BoxEvent::new(vec![-1.0], vec![0.0]).unwrap();
    let c = many_to_one_check(&event, 50.0, 200_000, &SeededStream::new(4, 0), 10_000).unwrap();
    let exact = 1.0 - (-1.0f64).exp();
    assert!(c.agree);
    assert!((c.lhs - exact).abs() < 4.0 * c.lhs_sigma, "{} vs {exact}", c.lhs);
    assert!((c.rhs - exact).abs() < 4.0 * c.rhs_sigma, "{} vs {exact}", c.rhs);
}

#[test]
fn first_crossing_at_level_zero() {
    let mut s = SeededStream::new(5, 0);
    let trials = 100_000u64;
    let first_step = (0..trials).filter(|_| first_crossing_time(0.0, 1, &mut s) == Some(1)).count();
    let p = first_step as f64 / trials as f64;
    let exact = 1.0 - (-1.0f64).exp();
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((p - exact).abs() < 4.0 * sigma, "{p} vs {exact}");
}

#[test]
fn crossing_undershoot_is_at_most_one() {
    // steps are at least −1, so the walk lands in [−x − 1, −x)
    let x = 3.0;
    let mut s = SeededStream::new(6, 0);
    for _ in 0..2000 {
        let mut y = 0.0;
        for _ in 0..10_000 {
            y += exp1(&mut s) - 1.0;
            if y < -x {
                assert!(y >= -x - 1.0);
                break;
            }
        }
    }
    let mut s = SeededStream::new(6, 1);
    let hits = (0..2000).filter(|_| first_crossing_time(x, 10_000, &mut s).is_some()).count();
    assert!(hits > 1800, "the centered walk crosses a fixed level with high probability, got {hits}");
}

#[test]
fn selection_speed_shrinks_with_population() {
    let speed = |keep: usize| -> f64 {
        let m: Moments = (0..4u64)
            .map(|seed| velocity(&nbrw_run(keep, 1, 2000, &SeededStream::new(seed, 7)).unwrap().mins()))
            .collect();
        m.mean()
    };
    let (v10, v100) = (speed(10), speed(100));
    let ln2 = |n: f64| n.ln().powi(2);
    // leading order predicts a ratio of 4; the ln ln N corrections pull it down
    let ratio = v10 / v100;
    assert!(v100 > 0.0 && (2.0..4.5).contains(&ratio), "v(10) = {v10}, v(100) = {v100}");
    assert!(v10 * ln2(10.0) < v100 * ln2(100.0));
    assert!(v100 * ln2(100.0) < std::f64::consts::PI.powi(2) / 2.0);
}
