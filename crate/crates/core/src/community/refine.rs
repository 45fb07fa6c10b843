use crate::bigraph::SimilarityGraph;
use crate::error::{Error, Result};
use crate::partition::Partition;

// Moves must beat this to count as improvements; keeps float noise from cycling.
const MIN_GAIN: f64 = 1e-12;

/// Single-node moves: each node in index order moves to the neighboring
/// cluster with the largest positive modularity gain (ties to the smallest
/// cluster id). Stops after a pass without moves or after `max_passes`.
pub fn refine(g: &SimilarityGraph, p: &Partition, max_passes: usize) -> Result<Partition> {
    let n = g.n_nodes();
    if p.len() != n {
        return Err(Error::PartitionMismatch(format!(
            "partition has {} elements, graph has {} nodes",
            p.len(),
            n
        )));
    }
    let total = g.total_weight();
    if total <= 0.0 || max_passes == 0 {
        return Ok(p.clone());
    }
    let mut assign = p.assignment().to_vec();
    let mut cluster_degree = vec![0.0; p.k()];
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    for i in 0..n {
        cluster_degree[assign[i]] += degree[i];
    }
    let mut link = vec![0.0; p.k()];
    let mut touched: Vec<usize> = Vec::new();
    let denom = 2.0 * total * total;

    for _ in 0..max_passes {
        let mut moved = false;
        for i in 0..n {
            let own = assign[i];
            for &(j, w) in g.neighbors(i) {
                let c = assign[j];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            // Gain of moving i from its cluster A to B:
            // (k_iB − k_iA)/W − d_i·(D_B − D_A + d_i)/(2W²)
            let k_own = link[own];
            let d_own = cluster_degree[own];
            touched.sort_unstable();
            let mut best: Option<(f64, usize)> = None;
            for &c in &touched {
                if c == own {
                    continue;
                }
                let dq = (link[c] - k_own) / total
                    - degree[i] * (cluster_degree[c] - d_own + degree[i]) / denom;
                if dq > MIN_GAIN && best.is_none_or(|(b, _)| dq > b) {
                    best = Some((dq, c));
                }
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
            if let Some((_, c)) = best {
                cluster_degree[own] -= degree[i];
                cluster_degree[c] += degree[i];
                assign[i] = c;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(Partition::new(&assign))
}
