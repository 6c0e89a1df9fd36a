//! Front position of the N-selection walk after `⌊t ln³N⌋` generations,
//! started from N particles at the origin, scaled by `ln N`.

use awplab::nbrw::{front_horizon, nbrw_run};
use awplab::rng::SeededStream;
use awplab::stats::Moments;
use awplab::walk::MOGULSKII_CONSTANT;

fn main() -> awplab::Result<()> {
    let target = -1.0 + MOGULSKII_CONSTANT;
    println!("N,steps,mean_scaled_min,sd,target");
    for keep in [100usize, 1000] {
        let steps = front_horizon(keep, 1.0);
        let m: Moments = (0..50u64)
            .map(|seed| {
                let run = nbrw_run(keep, keep, steps, &SeededStream::new(seed, 1)).expect("valid run");
                run.final_min() / (keep as f64).ln()
            })
            .collect();
        println!("{keep},{steps},{:.4},{:.4},{target:.4}", m.mean(), m.sd());
    }
    Ok(())
}
