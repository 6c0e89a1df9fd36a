//! Monte Carlo corridor survival against the spectral decay rate.

use awplab::rng::SeededStream;
use awplab::walk::{confinement_mc, confinement_spectral};

fn main() -> awplab::Result<()> {
    let delta = 5.0;
    let stream = SeededStream::new(7, 0);
    let short = confinement_mc(-delta / 2.0, delta, 0.0, 20, 2_000_000, &stream)?;
    let long = confinement_mc(-delta / 2.0, delta, 0.0, 60, 2_000_000, &stream)?;
    let mc_rate = -(long.estimate / short.estimate).ln() / 40.0;
    let spectral = confinement_spectral(delta, 128)?;
    println!("delta={delta} mc_rate={mc_rate:.5} (p20={:.3e}, p60={:.3e}) spectral_rate={:.5}", short.estimate, long.estimate, spectral.rate);
    Ok(())
}
