use serde::{Deserialize, Serialize};

use crate::cocluster::CoClusterModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoUnit {
    #[default]
    Nats,
    Bits,
}

impl InfoUnit {
    fn ln_base(self) -> f64 {
        match self {
            InfoUnit::Nats => 1.0,
            InfoUnit::Bits => std::f64::consts::LN_2,
        }
    }
}

/// One co-cluster's share of the traversals and its mutual-information term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiCell {
    pub trajectory_cluster: usize,
    pub segment_cluster: usize,
    pub traversals: u64,
    /// `P(c_S, c_T)`: observed traversal share.
    pub joint: f64,
    /// `P(c_T)`.
    pub trajectory_share: f64,
    /// `P(c_S)`.
    pub segment_share: f64,
    /// `P(c_T) P(c_S)`: share expected if the two clusters were independent.
    pub expected: f64,
    /// `P(c_S, c_T) log(P(c_S, c_T) / (P(c_S) P(c_T)))`; 0 for empty co-clusters.
    pub mi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    pub unit: InfoUnit,
    /// Row-major over (trajectory cluster, segment cluster).
    pub cells: Vec<MiCell>,
    pub total: f64,
}

/// Mutual-information contributions of a co-cluster count table
/// (`table[c][d]`: traversals of segment cluster `d` by trajectory cluster `c`).
pub fn mutual_information_table(table: &[Vec<u64>], unit: InfoUnit) -> Result<MiReport> {
    let n: u64 = table.iter().flatten().sum();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let cols = table.first().map_or(0, Vec::len);
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::Config("ragged co-cluster table".into()));
    }
    let n = n as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64 / n).collect();
    let segs: Vec<f64> = (0..cols).map(|d| table.iter().map(|r| r[d]).sum::<u64>() as f64 / n).collect();
    let mut cells = Vec::with_capacity(rows.len() * cols);
    for (c, row) in table.iter().enumerate() {
        for (d, &x) in row.iter().enumerate() {
            let joint = x as f64 / n;
            let expected = rows[c] * segs[d];
            let mi = if x == 0 { 0.0 } else { joint * (joint / expected).ln() / unit.ln_base() };
            cells.push(MiCell {
                trajectory_cluster: c,
                segment_cluster: d,
                traversals: x,
                joint,
                trajectory_share: rows[c],
                segment_share: segs[d],
                expected,
                mi,
            });
        }
    }
    let total = cells.iter().map(|c| c.mi).sum();
    Ok(MiReport { unit, cells, total })
}

pub fn mutual_information(model: &CoClusterModel, unit: InfoUnit) -> Result<MiReport> {
    mutual_information_table(&model.contingency(), unit)
}
