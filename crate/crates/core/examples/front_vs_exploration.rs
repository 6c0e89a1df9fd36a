//! Minimum position of the N-selection walk next to the lightest active
//! vertex of the graph exploration it approximates.

use awplab::exploration::run_exploration;
use awplab::graph::EdgeOracle;
use awplab::nbrw::nbrw_run;
use awplab::rng::SeededStream;

fn main() -> awplab::Result<()> {
    let (n, keep, steps) = (10_000usize, 100usize, 90usize);
    let start: Vec<usize> = (1..=keep).collect();
    let seeds = 20u64;
    let mut brw = vec![0.0; steps];
    let mut graph = vec![0.0; steps];
    for seed in 0..seeds {
        let s = SeededStream::new(seed, 4);
        for (acc, m) in brw.iter_mut().zip(nbrw_run(keep, keep, steps, &s)?.mins()) {
            *acc += m / seeds as f64;
        }
        let mut oracle = EdgeOracle::lazy(n)?;
        for (acc, m) in graph.iter_mut().zip(run_exploration(keep, steps, &start, &mut oracle, &s)?.min_v()) {
            *acc += m / seeds as f64;
        }
    }
    println!("generation,brw_min,exploration_min");
    for k in (0..steps).step_by(5) {
        println!("{},{:.3},{:.3}", k + 1, brw[k], graph[k]);
    }
    Ok(())
}
