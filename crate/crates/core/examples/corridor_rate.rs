//! Principal corridor eigenvalue for a range of widths, compared with π²/2.

use awplab::walk::{confinement_spectral, MOGULSKII_CONSTANT};

fn main() -> awplab::Result<()> {
    println!("delta,grid,rate,scaled_rate,error_bar");
    for delta in [5.0, 10.0, 20.0, 40.0] {
        let grid = (16.0 * delta) as usize;
        let r = confinement_spectral(delta, grid.max(64))?;
        println!("{},{},{:.9e},{:.6},{:.2e}", delta, r.grid, r.rate, r.scaled_rate(), r.error_bar * delta * delta);
    }
    println!("reference {MOGULSKII_CONSTANT:.6}");
    Ok(())
}
