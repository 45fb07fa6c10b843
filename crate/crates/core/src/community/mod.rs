//! Hierarchical modularity clustering of similarity graphs.
//!
//! Greedy agglomeration merges the cluster pair with the largest modularity
//! gain until the hierarchy is complete; cuts of the resulting dendrogram
//! give the nested levels, and single-node moves polish a chosen level.

mod agglomerate;
mod refine;

pub use agglomerate::{agglomerate, Dendrogram, Merge};
pub use refine::refine;

use serde::{Deserialize, Serialize};

use crate::bigraph::SimilarityGraph;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Newman modularity of `p` on `g`:
/// `Q = Σ_c [ W_c / W − (d_c / 2W)² ]`.
pub fn modularity(g: &SimilarityGraph, p: &Partition) -> Result<f64> {
    if p.len() != g.n_nodes() {
        return Err(Error::PartitionMismatch(format!(
            "partition has {} elements, graph has {} nodes",
            p.len(),
            g.n_nodes()
        )));
    }
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    let mut internal = vec![0.0; p.k()];
    let mut degree = vec![0.0; p.k()];
    for (a, b, w) in g.edges() {
        let (ca, cb) = (p.cluster_of(a), p.cluster_of(b));
        // 2w is exact, which makes the one-cluster value exactly 0.
        if ca == cb {
            internal[ca] += w;
            degree[ca] += 2.0 * w;
        } else {
            degree[ca] += w;
            degree[cb] += w;
        }
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(wc, dc)| wc / total - (dc / (2.0 * total)).powi(2))
        .sum())
}

/// Which level of a dendrogram to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutTarget {
    Clusters(usize),
    BestQ,
}

/// Partition after the first `n - k` merges.
pub fn cut(d: &Dendrogram, target: CutTarget) -> Result<Partition> {
    let n = d.n_nodes();
    let prefix = match target {
        CutTarget::Clusters(k) => {
            if k == 0 || k > n {
                return Err(Error::TargetOutOfRange { target: k, max: n });
            }
            n - k
        }
        CutTarget::BestQ => d.best_prefix(),
    };
    Ok(d.partition_after(prefix))
}

/// Agglomerate, cut and refine in one call.
pub fn cluster(
    g: &SimilarityGraph,
    target: CutTarget,
    max_passes: usize,
) -> Result<(Dendrogram, Partition)> {
    let d = agglomerate(g)?;
    let p = cut(&d, target)?;
    let p = refine(g, &p, max_passes)?;
    Ok((d, p))
}
