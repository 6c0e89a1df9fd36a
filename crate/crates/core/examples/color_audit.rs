//! Blue, red and purple counts of the exploration coupled to the selection
//! walk, against the bound on the non-blue fraction.

use awplab::exploration::coupled_color_audit;
use awplab::rng::SeededStream;

fn main() -> awplab::Result<()> {
    let audit = coupled_color_audit(20_000, 40, 30, 1, &SeededStream::new(11, 0))?;
    println!("generation,blue,red,purple,non_blue_fraction,bound");
    for c in &audit.counts {
        println!("{},{},{},{},{:.4},{:.4}", c.generation, c.blue, c.red, c.purple, c.non_blue_fraction(), c.bound);
    }
    println!("sandwich violations: upper {}, lower {}", audit.upper_violations, audit.lower_violations);
    Ok(())
}
