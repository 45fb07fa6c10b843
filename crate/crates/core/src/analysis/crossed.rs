use serde::{Deserialize, Serialize};

use crate::bigraph::TraversalMatrix;
use crate::error::{Error, Result};
use crate::generator::TrajectoryId;
use crate::network::SegmentId;
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub trajectory_cluster: usize,
    pub segment_cluster: usize,
    pub trajectories: usize,
    pub segments: usize,
    pub traversals: u64,
    /// Traversals per matrix cell of the block.
    pub density: f64,
}

/// The traversal matrix with rows and columns grouped by cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossedMatrix {
    /// Trajectory ids in display order: by cluster, then by matrix order.
    pub trajectory_order: Vec<TrajectoryId>,
    pub segment_order: Vec<SegmentId>,
    /// Start offset of each trajectory cluster in `trajectory_order`, plus the end.
    pub trajectory_boundaries: Vec<usize>,
    pub segment_boundaries: Vec<usize>,
    /// Row-major over (trajectory cluster, segment cluster).
    pub blocks: Vec<Block>,
}

impl CrossedMatrix {
    /// Blocks as a dense density table.
    pub fn density_table(&self) -> Vec<Vec<f64>> {
        let kt = self.trajectory_boundaries.len() - 1;
        let ks = self.segment_boundaries.len() - 1;
        (0..kt)
            .map(|c| (0..ks).map(|d| self.blocks[c * ks + d].density).collect())
            .collect()
    }

    /// Block densities as a binary greyscale image (PGM), one pixel per
    /// matrix cell, darker for denser blocks.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (h, w) = (self.trajectory_order.len(), self.segment_order.len());
        let max = self.blocks.iter().map(|b| b.density).fold(0.0, f64::max);
        let ks = self.segment_boundaries.len() - 1;
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        let row_cluster = expand(&self.trajectory_boundaries);
        let col_cluster = expand(&self.segment_boundaries);
        for &c in &row_cluster {
            for &d in &col_cluster {
                let v = if max > 0.0 { self.blocks[c * ks + d].density / max } else { 0.0 };
                out.push(255 - (v * 255.0).round() as u8);
            }
        }
        out
    }
}

fn expand(bounds: &[usize]) -> Vec<usize> {
    bounds
        .windows(2)
        .enumerate()
        .flat_map(|(c, w)| std::iter::repeat_n(c, w[1] - w[0]))
        .collect()
}

/// Groups the matrix by a trajectory partition (rows) and a segment
/// partition (columns) and measures each block's density.
pub fn crossed_matrix(matrix: &TraversalMatrix, rows: &Partition, cols: &Partition) -> Result<CrossedMatrix> {
    if rows.len() != matrix.n_rows() || cols.len() != matrix.n_cols() {
        return Err(Error::ElementMismatch(format!(
            "partitions cover {}x{} items, matrix is {}x{}",
            rows.len(),
            cols.len(),
            matrix.n_rows(),
            matrix.n_cols()
        )));
    }
    let (row_groups, col_groups) = (rows.clusters(), cols.clusters());
    let mut counts = vec![vec![0u64; cols.k()]; rows.k()];
    for i in 0..matrix.n_rows() {
        for &(j, x) in matrix.row(i) {
            counts[rows.cluster_of(i)][cols.cluster_of(j)] += x as u64;
        }
    }
    let mut blocks = Vec::with_capacity(rows.k() * cols.k());
    for (c, rg) in row_groups.iter().enumerate() {
        for (d, cg) in col_groups.iter().enumerate() {
            let x = counts[c][d];
            blocks.push(Block {
                trajectory_cluster: c,
                segment_cluster: d,
                trajectories: rg.len(),
                segments: cg.len(),
                traversals: x,
                density: x as f64 / (rg.len() * cg.len()) as f64,
            });
        }
    }
    let bounds = |groups: &[Vec<usize>]| -> Vec<usize> {
        std::iter::once(0)
            .chain(groups.iter().scan(0, |acc, g| {
                *acc += g.len();
                Some(*acc)
            }))
            .collect()
    };
    Ok(CrossedMatrix {
        trajectory_order: row_groups.iter().flatten().map(|&i| matrix.trajectory_ids()[i]).collect(),
        segment_order: col_groups.iter().flatten().map(|&j| matrix.segment_ids()[j]).collect(),
        trajectory_boundaries: bounds(&row_groups),
        segment_boundaries: bounds(&col_groups),
        blocks,
    })
}
