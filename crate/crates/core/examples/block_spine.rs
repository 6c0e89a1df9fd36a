//! A long path assembled block by block, with its weight split into block
//! paths and connecting edges.

use awplab::exploration::{block_decomposition_error, block_exploration};
use awplab::graph::EdgeOracle;
use awplab::rng::SeededStream;

fn main() -> awplab::Result<()> {
    let (n, keep, delta) = (20_000usize, 20usize, 27usize);
    let mut oracle = EdgeOracle::lazy(n)?;
    let (spine, blocks) = block_exploration(delta, keep, 300, 1, &mut oracle, &SeededStream::new(5, 0))?;
    println!("spine length {}, average weight {:.4}", spine.len(), spine.average());
    println!("block,restart,block_weight,connecting_edge");
    for (i, w) in blocks.block_weights.iter().enumerate() {
        let edge = blocks.stored.get(i).map_or(f64::NAN, |e| e.label);
        println!("{i},{},{w:.4},{edge:.4}", blocks.tau[i]);
    }
    println!("decomposition error {:.2e}", block_decomposition_error(&spine, &blocks));
    for beta in [0.1, 0.2, 0.3] {
        let (start, len) = spine.longest_segment_below(beta);
        println!("longest stretch with average <= {beta}: {len} edges from edge {start}");
    }
    Ok(())
}
