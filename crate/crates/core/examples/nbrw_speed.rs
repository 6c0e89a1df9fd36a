//! Asymptotic front speed of the N-selection walk against `π²/(2 ln²N)`.

use awplab::nbrw::{nbrw_run, velocity};
use awplab::rng::SeededStream;
use awplab::stats::Moments;
use awplab::walk::MOGULSKII_CONSTANT;

fn main() -> awplab::Result<()> {
    println!("N,steps,velocity,sd,leading_order");
    for keep in [10usize, 100, 1000] {
        let steps = 4000;
        let m: Moments = (0..8u64)
            .map(|seed| velocity(&nbrw_run(keep, 1, steps, &SeededStream::new(seed, 2)).expect("valid run").mins()))
            .collect();
        let ln = (keep as f64).ln();
        println!("{keep},{steps},{:.5},{:.5},{:.5}", m.mean(), m.sd(), MOGULSKII_CONSTANT / (ln * ln));
    }
    Ok(())
}
