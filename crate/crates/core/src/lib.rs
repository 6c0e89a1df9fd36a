//! Simulation toolkit for long low-weight paths in the complete graph with
//! shifted exponential edge labels, the associated N-branching random walk,
//! and the corridor estimates for the centered exponential walk.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod exploration;
pub mod graph;
pub mod nbrw;
pub mod plot;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
