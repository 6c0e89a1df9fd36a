//! Drop counts, top-k exponential sums and the bounded-drop tilt estimate
//! for the centered exponential walk.

use awplab::rng::SeededStream;
use awplab::walk::{drop_count, max_drop_tilt_check, top_k_exp_sum, y_walk};

fn main() -> awplab::Result<()> {
    let trace = y_walk(1000, &mut SeededStream::new(1, 0));
    for delta in [1.0, 3.0, 10.0] {
        println!("drop count at delta={delta}: {}", drop_count(&trace, delta));
    }
    for (len, k) in [(100, 10), (1000, 10), (1000, 100)] {
        let c = top_k_exp_sum(len, k, 20_000, &SeededStream::new(2, len as u64 + k as u64))?;
        println!("top {k} of {len}: mean {:.3} +- {:.3}, bound {:.3}", c.mean, c.sigma, c.bound);
    }
    let d = max_drop_tilt_check(400, 10.0, 2.0, 100_000, &SeededStream::new(3, 0))?;
    println!("bounded drop: joint {:.3e}, drop only {:.3e}, references {:?}", d.joint.estimate, d.drop_only.estimate, d.references);
    Ok(())
}
