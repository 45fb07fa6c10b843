//! The bipartite trajectory/segment graph and its two weighted one-mode
//! projections.

mod matrix;
mod projection;
pub mod weights;

pub use matrix::{MatrixFile, TraversalMatrix};
pub use projection::{
    project_segments, project_trajectories, GraphSidecar, NodeKind, SimilarityGraph, EDGE_CSV_HEADER,
};
pub use weights::{segment_contribution, trajectory_relevance};
