use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{TrajectoryDataset, TrajectoryId};
use crate::network::SegmentId;

/// Trajectory x segment traversal counts: the bipartite graph in matrix form.
///
/// Rows follow dataset order; columns are the traversed segments in
/// ascending id order. Every row and every column has a positive entry.
#[derive(Clone, Debug, PartialEq)]
pub struct TraversalMatrix {
    trajectory_ids: Vec<TrajectoryId>,
    labels: Vec<Option<String>>,
    segment_ids: Vec<SegmentId>,
    rows: Vec<Vec<(usize, u32)>>,
    cols: Vec<Vec<(usize, u32)>>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    total: u64,
}

/// Serialized form: ids plus `[row, col, count]` triplets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub trajectory_ids: Vec<TrajectoryId>,
    pub labels: Vec<Option<String>>,
    pub segment_ids: Vec<SegmentId>,
    pub total: u64,
    pub entries: Vec<(usize, usize, u32)>,
}

impl TraversalMatrix {
    pub fn from_dataset(ds: &TrajectoryDataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut col_of: BTreeMap<SegmentId, usize> = BTreeMap::new();
        for t in &ds.trajectories {
            if t.segments.is_empty() {
                return Err(Error::InvalidTrajectory {
                    trajectory: t.id,
                    msg: "empty segment sequence".into(),
                });
            }
            for &s in &t.segments {
                col_of.insert(s, 0);
            }
        }
        for (j, slot) in col_of.values_mut().enumerate() {
            *slot = j;
        }
        let mut entries = Vec::new();
        for (i, t) in ds.trajectories.iter().enumerate() {
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for s in &t.segments {
                *counts.entry(col_of[s]).or_default() += 1;
            }
            entries.extend(counts.into_iter().map(|(j, c)| (i, j, c)));
        }
        Self::from_parts(
            ds.trajectories.iter().map(|t| t.id).collect(),
            ds.trajectories.iter().map(|t| t.label.clone()).collect(),
            col_of.into_keys().collect(),
            &entries,
        )
    }

    /// Builds a matrix from explicit ids and `(row, col, count)` entries.
    /// Zero counts are dropped; duplicate cells are summed.
    pub fn from_parts(
        trajectory_ids: Vec<TrajectoryId>,
        labels: Vec<Option<String>>,
        segment_ids: Vec<SegmentId>,
        entries: &[(usize, usize, u32)],
    ) -> Result<Self> {
        let (n, m) = (trajectory_ids.len(), segment_ids.len());
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != n {
            return Err(Error::Config(format!("{} labels for {n} trajectories", labels.len())));
        }
        let mut cells: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for &(i, j, c) in entries {
            if i >= n || j >= m {
                return Err(Error::Config(format!("entry ({i}, {j}) outside {n}x{m} matrix")));
            }
            if c > 0 {
                *cells.entry((i, j)).or_default() += c;
            }
        }
        let mut rows = vec![Vec::new(); n];
        let mut cols = vec![Vec::new(); m];
        let mut row_totals = vec![0u64; n];
        let mut col_totals = vec![0u64; m];
        for (&(i, j), &c) in &cells {
            rows[i].push((j, c));
            cols[j].push((i, c));
            row_totals[i] += c as u64;
            col_totals[j] += c as u64;
        }
        if let Some(i) = rows.iter().position(Vec::is_empty) {
            return Err(Error::InvalidTrajectory {
                trajectory: trajectory_ids[i],
                msg: "row has no traversal".into(),
            });
        }
        if let Some(j) = cols.iter().position(Vec::is_empty) {
            return Err(Error::Config(format!("segment {} has no traversal", segment_ids[j])));
        }
        let total = row_totals.iter().sum();
        Ok(TraversalMatrix {
            trajectory_ids,
            labels,
            segment_ids,
            rows,
            cols,
            row_totals,
            col_totals,
            total,
        })
    }

    /// Unlabeled matrix from a dense count table (tests, small examples).
    pub fn from_dense(counts: &[Vec<u32>]) -> Result<Self> {
        let n = counts.len();
        let m = counts.first().map_or(0, Vec::len);
        let entries: Vec<_> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &c)| (i, j, c)))
            .collect();
        Self::from_parts(
            (0..n as u64).collect(),
            vec![None; n],
            (0..m as u64).collect(),
            &entries,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// `(col, count)` pairs of a trajectory, ascending by column.
    pub fn row(&self, i: usize) -> &[(usize, u32)] {
        &self.rows[i]
    }

    /// `(row, count)` pairs of a segment, ascending by row.
    pub fn col(&self, j: usize) -> &[(usize, u32)] {
        &self.cols[j]
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0, |k| self.rows[i][k].1)
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.row_totals[i]
    }

    pub fn col_total(&self, j: usize) -> u64 {
        self.col_totals[j]
    }

    /// Total traversal count N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of non-zero cells, i.e. bipartite edges.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn trajectory_ids(&self) -> &[TrajectoryId] {
        &self.trajectory_ids
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn segment_ids(&self) -> &[SegmentId] {
        &self.segment_ids
    }

    pub fn row_of(&self, id: TrajectoryId) -> Option<usize> {
        self.trajectory_ids.iter().position(|&t| t == id)
    }

    pub fn col_of(&self, id: SegmentId) -> Option<usize> {
        self.segment_ids.binary_search(&id).ok()
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            trajectory_ids: self.trajectory_ids.clone(),
            labels: self.labels.clone(),
            segment_ids: self.segment_ids.clone(),
            total: self.total,
            entries: self
                .rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().map(move |&(j, c)| (i, j, c)))
                .collect(),
        }
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        let m = Self::from_parts(
            file.trajectory_ids.clone(),
            file.labels.clone(),
            file.segment_ids.clone(),
            &file.entries,
        )?;
        if m.total != file.total {
            return Err(Error::Config(format!(
                "matrix file declares total {} but entries sum to {}",
                file.total, m.total
            )));
        }
        Ok(m)
    }
}
