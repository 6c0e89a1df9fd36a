//! Longest low-average path found by exploration, scaled by `ln³n`, for a
//! few graph sizes and selection exponents.

use awplab::exploration::run_exploration;
use awplab::graph::EdgeOracle;
use awplab::rng::SeededStream;
use awplab::stats::Moments;
use awplab::walk::MOGULSKII_CONSTANT;

fn main() -> awplab::Result<()> {
    let alpha = 0.0;
    println!("a,n,N,steps,mean_len,ratio,sem");
    for a in [0.3f64, 0.4, 0.5] {
        for n in [1000usize, 3000, 10_000] {
            let keep = (n as f64).powf(a).floor() as usize;
            let steps = (n - 1) / keep;
            let ln = (n as f64).ln();
            let lambda = alpha / (ln * ln);
            let start: Vec<usize> = (1..=keep).collect();
            let lens: Moments = (0..200u64)
                .map(|seed| {
                    let mut oracle = EdgeOracle::lazy(n).expect("n >= 2");
                    let run = run_exploration(keep, steps, &start, &mut oracle, &SeededStream::new(seed, 3)).expect("feasible");
                    run.best_below(&oracle, lambda).expect("known edges").map_or(0, |w| w.len()) as f64
                })
                .collect();
            let ratio = lens.mean() * (MOGULSKII_CONSTANT - alpha) / ln.powi(3);
            println!("{a},{n},{keep},{steps},{:.2},{:.4},{:.4}", lens.mean(), ratio, lens.sem() * (MOGULSKII_CONSTANT - alpha) / ln.powi(3));
        }
    }
    Ok(())
}
