//! Ordered edge labels built from the same exponential gaps as a Poisson
//! process, with the gap identity and the two-sided bound checked.

use awplab::rng::{coupled_order_stats, SeededStream};

fn main() -> awplab::Result<()> {
    let n = 1000;
    let c = coupled_order_stats(&mut SeededStream::new(1, 0), n, 20)?;
    println!("i,T_i,X_(i),lower,upper");
    for i in 1..=c.m {
        let (t, x) = (c.t[i - 1], c.x[i - 1]);
        let lower = std::f64::consts::E * t - 1.0;
        let upper = n as f64 / (n - i) as f64 * lower + i as f64 / (n - i) as f64;
        println!("{i},{t:.4},{x:.4},{lower:.4},{upper:.4}");
    }
    println!("identity error {:.2e}, bound violations {}", c.identity_error(), c.sandwich_violations());
    Ok(())
}
