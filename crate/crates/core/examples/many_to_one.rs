//! Weighted particle counts of the killed branching walk against the
//! probability that a single centered walk stays in the same box.

use awplab::nbrw::many_to_one_check;
use awplab::rng::SeededStream;
use awplab::walk::BoxEvent;

fn main() -> awplab::Result<()> {
    for (len, lo, hi) in [(1, -1.0, 0.0), (3, -1.0, 1.0), (4, -2.0, 2.0)] {
        let event = BoxEvent::cube(len, lo, hi)?;
        let c = many_to_one_check(&event, 50.0, 200_000, &SeededStream::new(len as u64, 0), 1_000_000)?;
        println!(
            "len={len} box=[{lo},{hi}]: branching {:.5} +- {:.5}, walk {:.5} +- {:.5}, agree {}",
            c.lhs, c.lhs_sigma, c.rhs, c.rhs_sigma, c.agree
        );
    }
    Ok(())
}
