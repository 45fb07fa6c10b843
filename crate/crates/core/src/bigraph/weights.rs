//! tf-idf style contributions on both sides of the traversal matrix.
//!
//! Segment-in-trajectory weight (length share times inverse trajectory
//! frequency):
//!
//! `w(s,T) = n(s,T)·len(s) / Σ_{s'∈T} n(s',T)·len(s')  ·  ln(|T| / |{T_i : s ∈ T_i}|)`
//!
//! Trajectory-in-segment weight (visit share times trajectory relevance):
//!
//! `w(T,s) = n(s,T) / Σ_{T'} n(s,T')  ·  ln(|S| / |{s' : s' ∈ T}|)`
//!
//! Natural logarithms throughout.

use crate::error::{Error, Result};
use crate::network::RoadNetwork;

use super::TraversalMatrix;

/// Sparse weight vectors, one per trajectory (over segment columns) or one
/// per segment (over trajectory rows). Entries are `(index, weight)`
/// ascending by index and include zero weights for visited cells.
pub type SparseVectors = Vec<Vec<(usize, f64)>>;

fn segment_lengths(matrix: &TraversalMatrix, net: &RoadNetwork) -> Result<Vec<f64>> {
    matrix
        .segment_ids()
        .iter()
        .map(|&id| {
            net.segment(id)
                .map(|s| s.length)
                .ok_or(Error::UnknownSegment(id))
        })
        .collect()
}

fn trajectory_idf(matrix: &TraversalMatrix, col: usize) -> f64 {
    (matrix.n_rows() as f64 / matrix.col(col).len() as f64).ln()
}

fn trajectory_relevance_factor(matrix: &TraversalMatrix, row: usize) -> f64 {
    (matrix.n_cols() as f64 / matrix.row(row).len() as f64).ln()
}

fn not_visited(matrix: &TraversalMatrix, row: usize, col: usize) -> Error {
    Error::NotVisited {
        trajectory: matrix.trajectory_ids()[row],
        segment: matrix.segment_ids()[col],
    }
}

/// Contribution of segment column `col` to trajectory row `row`.
pub fn segment_contribution(
    matrix: &TraversalMatrix,
    net: &RoadNetwork,
    row: usize,
    col: usize,
) -> Result<f64> {
    let n = matrix.count(row, col);
    if n == 0 {
        return Err(not_visited(matrix, row, col));
    }
    let lengths = segment_lengths(matrix, net)?;
    let denom: f64 = matrix
        .row(row)
        .iter()
        .map(|&(j, c)| c as f64 * lengths[j])
        .sum();
    Ok(n as f64 * lengths[col] / denom * trajectory_idf(matrix, col))
}

/// Relevance of trajectory row `row` to segment column `col`.
pub fn trajectory_relevance(matrix: &TraversalMatrix, row: usize, col: usize) -> Result<f64> {
    let n = matrix.count(row, col);
    if n == 0 {
        return Err(not_visited(matrix, row, col));
    }
    Ok(n as f64 / matrix.col_total(col) as f64 * trajectory_relevance_factor(matrix, row))
}

/// All `w(s,T)`, one sparse vector per trajectory.
pub fn trajectory_vectors(matrix: &TraversalMatrix, net: &RoadNetwork) -> Result<SparseVectors> {
    let lengths = segment_lengths(matrix, net)?;
    let idf: Vec<f64> = (0..matrix.n_cols())
        .map(|j| trajectory_idf(matrix, j))
        .collect();
    Ok((0..matrix.n_rows())
        .map(|i| {
            let row = matrix.row(i);
            let denom: f64 = row.iter().map(|&(j, c)| c as f64 * lengths[j]).sum();
            row.iter()
                .map(|&(j, c)| (j, c as f64 * lengths[j] / denom * idf[j]))
                .collect()
        })
        .collect())
}

/// All `w(T,s)`, one sparse vector per segment.
pub fn segment_vectors(matrix: &TraversalMatrix) -> SparseVectors {
    let relevance: Vec<f64> = (0..matrix.n_rows())
        .map(|i| trajectory_relevance_factor(matrix, i))
        .collect();
    (0..matrix.n_cols())
        .map(|j| {
            let total = matrix.col_total(j) as f64;
            matrix
                .col(j)
                .iter()
                .map(|&(i, c)| (i, c as f64 / total * relevance[i]))
                .collect()
        })
        .collect()
}
