use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::RoadNetwork;

use super::weights::{segment_vectors, trajectory_vectors, SparseVectors};
use super::TraversalMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Trajectory,
    Segment,
}

/// Undirected weighted similarity graph over trajectories or segments.
///
/// Adjacency is stored in both directions with identical weights, sorted by
/// neighbor index. No self-loops; every stored weight is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityGraph {
    kind: NodeKind,
    node_ids: Vec<u64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    zero_vector_nodes: Vec<usize>,
}

/// JSON sidecar accompanying the `node_a,node_b,weight` edge CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSidecar {
    pub kind: NodeKind,
    pub nodes: Vec<u64>,
    #[serde(default)]
    pub zero_vector_nodes: Vec<u64>,
}

pub const EDGE_CSV_HEADER: &str = "node_a,node_b,weight";

impl SimilarityGraph {
    /// Builds a graph from `(a, b, weight)` index triples with `a != b` and
    /// `weight > 0`. Each undirected edge must appear once.
    pub fn from_edges(kind: NodeKind, node_ids: Vec<u64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = node_ids.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::Config(format!("edge ({a}, {b}) references a missing node")));
            }
            if a == b {
                return Err(Error::Config(format!("self-loop on node {}", node_ids[a])));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Config(format!("edge ({a}, {b}) has non-positive weight {w}")));
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(k, _)| k);
            if list.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::Config("duplicate edge".into()));
            }
        }
        Ok(SimilarityGraph {
            kind,
            node_ids,
            adjacency,
            zero_vector_nodes: Vec::new(),
        })
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(k, _)| k)
            .map_or(0.0, |i| self.adjacency[a][i].1)
    }

    /// Weighted degree.
    pub fn degree(&self, node: usize) -> f64 {
        self.adjacency[node].iter().map(|&(_, w)| w).sum()
    }

    /// Edges with `a < b`, in ascending `(a, b)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&(b, _)| b > a).map(move |&(b, w)| (a, b, w)))
    }

    pub fn n_edges(&self) -> usize {
        self.edges().count()
    }

    /// Sum of edge weights, each undirected edge counted once.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Nodes whose weight vector was all zeros; they carry no edges.
    pub fn zero_vector_nodes(&self) -> &[usize] {
        &self.zero_vector_nodes
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(EDGE_CSV_HEADER);
        out.push('\n');
        for (a, b, w) in self.edges() {
            let _ = writeln!(out, "{},{},{}", self.node_ids[a], self.node_ids[b], w);
        }
        out
    }

    pub fn sidecar(&self) -> GraphSidecar {
        GraphSidecar {
            kind: self.kind,
            nodes: self.node_ids.clone(),
            zero_vector_nodes: self.zero_vector_nodes.iter().map(|&i| self.node_ids[i]).collect(),
        }
    }

    /// Rebuilds a graph from its CSV edge list and JSON sidecar.
    pub fn from_export(sidecar: &GraphSidecar, csv: &str, origin: &str) -> Result<Self> {
        let index: std::collections::HashMap<u64, usize> =
            sidecar.nodes.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut lines = csv.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == EDGE_CSV_HEADER => {}
            _ => return Err(Error::parse(origin, 1, format!("expected header {EDGE_CSV_HEADER:?}"))),
        }
        let mut edges = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(Error::parse(origin, i + 1, "expected node_a,node_b,weight"));
            }
            let node = |s: &str| -> Result<usize> {
                let id: u64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(origin, i + 1, format!("bad node id {s:?}")))?;
                index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| Error::parse(origin, i + 1, format!("node {id} not in sidecar")))
            };
            let w: f64 = f[2]
                .trim()
                .parse()
                .map_err(|_| Error::parse(origin, i + 1, format!("bad weight {:?}", f[2])))?;
            edges.push((node(f[0])?, node(f[1])?, w));
        }
        let mut g = Self::from_edges(sidecar.kind, sidecar.nodes.clone(), &edges)?;
        g.zero_vector_nodes = sidecar
            .zero_vector_nodes
            .iter()
            .filter_map(|id| index.get(id).copied())
            .collect();
        Ok(g)
    }
}

/// Trajectory similarity graph: cosine of the segment-contribution vectors.
pub fn project_trajectories(matrix: &TraversalMatrix, net: &RoadNetwork) -> Result<SimilarityGraph> {
    let vectors = trajectory_vectors(matrix, net)?;
    Ok(cosine_graph(
        NodeKind::Trajectory,
        matrix.trajectory_ids().to_vec(),
        &vectors,
        matrix.n_cols(),
    ))
}

/// Segment similarity graph: cosine of the trajectory-relevance vectors.
pub fn project_segments(matrix: &TraversalMatrix) -> SimilarityGraph {
    let vectors = segment_vectors(matrix);
    cosine_graph(
        NodeKind::Segment,
        matrix.segment_ids().to_vec(),
        &vectors,
        matrix.n_rows(),
    )
}

/// Pairwise cosine similarities, enumerated through an inverted index so only
/// pairs sharing a positively weighted coordinate are visited.
fn cosine_graph(kind: NodeKind, node_ids: Vec<u64>, vectors: &SparseVectors, dims: usize) -> SimilarityGraph {
    let n = vectors.len();
    let mut postings: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dims];
    for (i, v) in vectors.iter().enumerate() {
        for &(d, w) in v {
            if w > 0.0 {
                postings[d].push((i, w));
            }
        }
    }
    let norms: Vec<f64> = vectors
        .iter()
        .map(|v| v.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt())
        .collect();
    let zero_vector_nodes: Vec<usize> = (0..n).filter(|&i| norms[i] == 0.0).collect();
    for &i in &zero_vector_nodes {
        warn!("{kind:?} {} has an all-zero weight vector; it gets no edges", node_ids[i]);
    }

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut dot = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched = Vec::new();
    for i in 0..n {
        for &(d, wi) in &vectors[i] {
            if wi <= 0.0 {
                continue;
            }
            for &(k, wk) in &postings[d] {
                if k > i {
                    if !seen[k] {
                        seen[k] = true;
                        touched.push(k);
                    }
                    dot[k] += wi * wk;
                }
            }
        }
        touched.sort_unstable();
        for &k in &touched {
            let cos = dot[k] / (norms[i] * norms[k]);
            if cos > 0.0 {
                adjacency[i].push((k, cos));
                adjacency[k].push((i, cos));
            }
            dot[k] = 0.0;
            seen[k] = false;
        }
        touched.clear();
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(k, _)| k);
    }
    SimilarityGraph {
        kind,
        node_ids,
        adjacency,
        zero_vector_nodes,
    }
}
