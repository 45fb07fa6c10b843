use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Cross tabulation of two labelings of the same elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContingencyReport {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `counts[r][c]`: elements in row group `r` and column group `c`.
    pub counts: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    pub total: u64,
}

impl ContingencyReport {
    fn from_counts(row_labels: Vec<String>, col_labels: Vec<String>, counts: Vec<Vec<u64>>) -> Self {
        let row_totals: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<u64> = (0..col_labels.len()).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
        let total = row_totals.iter().sum();
        ContingencyReport {
            row_labels,
            col_labels,
            counts,
            row_totals,
            col_totals,
            total,
        }
    }

    /// Share of each row held by its largest column.
    pub fn purity(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(&self.row_totals)
            .map(|(r, &t)| if t == 0 { 0.0 } else { *r.iter().max().unwrap_or(&0) as f64 / t as f64 })
            .collect()
    }

    /// Column index of each row's largest entry (first one on ties).
    pub fn majority(&self) -> Vec<usize> {
        self.counts
            .iter()
            .map(|r| (0..r.len()).rev().max_by_key(|&c| r[c]).unwrap_or(0))
            .collect()
    }

    /// Rows whose purity reaches `threshold` (1.0: a single class).
    pub fn pure_rows(&self, threshold: f64) -> usize {
        self.purity().iter().filter(|&&p| p >= threshold).count()
    }

    pub fn all_pure(&self, threshold: f64) -> bool {
        self.pure_rows(threshold) == self.counts.len()
    }

    /// Overall purity: elements in their row's majority column over all elements.
    pub fn weighted_purity(&self) -> f64 {
        let hit: u64 = self.counts.iter().map(|r| r.iter().max().copied().unwrap_or(0)).sum();
        hit as f64 / self.total as f64
    }
}

/// Clusters (rows) against ground-truth classes (columns). Classes are
/// ordered numerically when every label is an integer, otherwise
/// lexicographically.
pub fn confusion(pred: &Partition, truth: &[String]) -> Result<ContingencyReport> {
    if pred.len() != truth.len() {
        return Err(Error::ElementMismatch(format!(
            "{} clustered elements, {} labels",
            pred.len(),
            truth.len()
        )));
    }
    let mut classes: Vec<&String> = truth.iter().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.iter().all(|c| c.parse::<i64>().is_ok()) {
        classes.sort_by_key(|c| c.parse::<i64>().expect("checked"));
    }
    let mut counts = vec![vec![0u64; classes.len()]; pred.k()];
    for (e, label) in truth.iter().enumerate() {
        let col = classes.iter().position(|c| *c == label).expect("class collected");
        counts[pred.cluster_of(e)][col] += 1;
    }
    let rows = (1..=pred.k()).map(|c| format!("C{c}")).collect();
    let cols = classes.into_iter().cloned().collect();
    Ok(ContingencyReport::from_counts(rows, cols, counts))
}

/// Two partitions of the same elements against each other.
pub fn contingency(p1: &Partition, p2: &Partition) -> Result<ContingencyReport> {
    if p1.len() != p2.len() {
        return Err(Error::ElementMismatch(format!("{} vs {} elements", p1.len(), p2.len())));
    }
    let mut counts = vec![vec![0u64; p2.k()]; p1.k()];
    for (&a, &b) in p1.assignment().iter().zip(p2.assignment()) {
        counts[a][b] += 1;
    }
    let rows = (1..=p1.k()).map(|c| format!("A{c}")).collect();
    let cols = (1..=p2.k()).map(|c| format!("B{c}")).collect();
    Ok(ContingencyReport::from_counts(rows, cols, counts))
}

/// Adjusted Rand index of two partitions of the same elements.
///
/// When both partitions are trivial in the same way (the expected and the
/// maximal index coincide) the index is 1.
pub fn adjusted_rand_index(p1: &Partition, p2: &Partition) -> Result<f64> {
    let t = contingency(p1, p2)?;
    let pairs = |x: u64| (x * x.saturating_sub(1) / 2) as f64;
    let index: f64 = t.counts.iter().flatten().map(|&x| pairs(x)).sum();
    let a: f64 = t.row_totals.iter().map(|&x| pairs(x)).sum();
    let b: f64 = t.col_totals.iter().map(|&x| pairs(x)).sum();
    let all = pairs(t.total);
    if all == 0.0 {
        return Ok(1.0);
    }
    let expected = a * b / all;
    let max = (a + b) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
