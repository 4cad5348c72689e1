//! Approximate distance oracles for weighted graphs under vertex failures.

pub mod bits;
mod error;
pub mod expath;
pub mod graph;
pub mod harness;
pub mod hierarchy;
mod locked;
pub mod oracle_eps;
pub mod oracle_poly;
pub mod reductions;
pub mod tree_cover;

pub use error::{Error, Result};
pub use graph::{Path, Vertex, Weight, WeightedGraph, INF};
pub use oracle_eps::{EpsConfig, EpsOracle, Mode};
pub use oracle_poly::{PolyConfig, PolyOracle};
