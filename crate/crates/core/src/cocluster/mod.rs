//! Direct co-clustering of the traversal matrix by minimizing a MAP cost.
//!
//! The cost trades model size (cluster counts, partitions, how traversals are
//! spread over co-clusters and over cluster members) against the cost of
//! re-encoding the data given the model. The search is a greedy merge
//! descent from the finest model, followed by single-item relocations,
//! restarted from perturbations of the best model found so far.

mod criterion;
mod greedy;
mod model;
mod post;
mod vns;

pub use criterion::{ln_bell_prefix, CostBreakdown, CostTables};
pub use greedy::greedy;
pub use model::{CoClusterModel, ModelFile, Problem, Side};
pub use post::post_optimize;
pub use vns::{vns_search, VnsConfig, VnsOutcome};
