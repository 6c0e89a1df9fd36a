//! The selected walk's minimum never exceeds that of a barrier-killed walk
//! driven by the same offspring, until the killed population outgrows N.

use awplab::nbrw::{barrier_survival, killed_vs_selected_dominance, BarrierSpec, KillRule};
use awplab::rng::SeededStream;

fn main() -> awplab::Result<()> {
    let horizon = 50;
    let barrier = BarrierSpec::growing_corridor(2.0, horizon)?;
    let trace = killed_vs_selected_dominance(100, &KillRule::Barrier(barrier.clone()), &[0.0], &[0.0], horizon, &SeededStream::new(3, 0))?;
    println!("generation,selected_min,killed_min");
    for (g, (s, k)) in trace.selected_min.iter().zip(&trace.killed_min).enumerate().step_by(5) {
        println!("{g},{s:.3},{k:.3}");
    }
    println!("violations {}, killed population reached N at {:?}", trace.violations(), trace.overflow_at);
    let (survived, capped) = barrier_survival(&barrier, 2000, &SeededStream::new(3, 1), 1_000_000)?;
    println!("barrier survival {survived}/2000 ({capped} runs hit the census cap)");
    Ok(())
}
