//! Exhaustive longest low-average path on a small graph, next to what the
//! exploration finds on the same labels.

use awplab::exact::{longest_from_profile, min_weight_profile, verify_witness};
use awplab::exploration::run_exploration;
use awplab::graph::EdgeOracle;
use awplab::rng::SeededStream;

fn main() -> awplab::Result<()> {
    let n = 9;
    let mut oracle = EdgeOracle::materialized(n, &mut SeededStream::new(42, 0))?;
    let profile = min_weight_profile(&oracle)?;
    let run = run_exploration(2, 4, &[1, 2], &mut oracle, &SeededStream::new(42, 1))?;
    println!("lambda,exact_len,exact_path,exploration_len,verified");
    for lambda in [-0.5, 0.0, 0.5, 1.0, 2.0] {
        let (len, path) = longest_from_profile(&profile, lambda);
        let found = run.best_below(&oracle, lambda)?;
        let verified = match &found {
            Some(w) => verify_witness(&oracle, w, lambda)?,
            None => true,
        };
        let path = path.map(|p| format!("{:?}", p.vertices)).unwrap_or_default();
        println!("{lambda},{len},\"{path}\",{},{verified}", found.map_or(0, |w| w.len()));
    }
    Ok(())
}
