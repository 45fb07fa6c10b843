//! Clustering of network-constrained trajectories through their bipartite
//! trajectory/segment traversal graph.

pub mod analysis;
pub mod bigraph;
pub mod cocluster;
pub mod community;
pub mod error;
pub mod generator;
pub mod network;
mod partition;

pub use error::{Error, Result};
pub use partition::Partition;
