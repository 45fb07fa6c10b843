//! Log-domain combinatorics for the MAP co-clustering cost.

use serde::{Deserialize, Serialize};

use crate::bigraph::TraversalMatrix;

/// Precomputed tables shared by every model over one traversal matrix.
#[derive(Clone, Debug)]
pub struct CostTables {
    ln_fact: Vec<f64>,
    /// `ln B(n, k)` for trajectories, indexed by `k` (entry 0 unused).
    ln_bell_rows: Vec<f64>,
    /// `ln B(m, k)` for segments.
    ln_bell_cols: Vec<f64>,
}

impl CostTables {
    pub fn new(matrix: &TraversalMatrix) -> Self {
        let (n, m) = (matrix.n_rows(), matrix.n_cols());
        let size = matrix.total() as usize + n.max(m) + 2;
        CostTables {
            ln_fact: (0..size)
                .map(|k| if k < 2 { 0.0 } else { libm::lgamma(k as f64 + 1.0) })
                .collect(),
            ln_bell_rows: ln_bell_prefix(n),
            ln_bell_cols: ln_bell_prefix(m),
        }
    }

    pub fn ln_fact(&self, k: u64) -> f64 {
        match self.ln_fact.get(k as usize) {
            Some(&v) => v,
            None => libm::lgamma(k as f64 + 1.0),
        }
    }

    /// `ln C(a, b)`.
    pub fn ln_choose(&self, a: u64, b: u64) -> f64 {
        debug_assert!(b <= a);
        self.ln_fact(a) - self.ln_fact(b) - self.ln_fact(a - b)
    }

    /// `ln B(n, k)` for the given side (0 = trajectories, 1 = segments).
    pub fn ln_bell(&self, side: usize, k: usize) -> f64 {
        if side == 0 {
            self.ln_bell_rows[k]
        } else {
            self.ln_bell_cols[k]
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ_{j≤k} S(n, j)` for `k = 0..=n`, with `S` the Stirling numbers of
/// the second kind. Entry 0 is `-inf` unless `n == 0`.
pub fn ln_bell_prefix(n: usize) -> Vec<f64> {
    // row[j] = ln S(r, j), advanced in place from r = 0 to n.
    let mut row = vec![f64::NEG_INFINITY; n + 1];
    row[0] = 0.0;
    let ln_j: Vec<f64> = (0..=n).map(|j| (j as f64).ln()).collect();
    for r in 1..=n {
        for j in (1..=r).rev() {
            let stay = if j < r { ln_j[j] + row[j] } else { f64::NEG_INFINITY };
            row[j] = log_add(stay, row[j - 1]);
        }
        row[0] = f64::NEG_INFINITY;
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = f64::NEG_INFINITY;
    for (j, &v) in row.iter().enumerate() {
        if j > 0 || n == 0 {
            acc = log_add(acc, v);
        }
        out.push(acc);
    }
    out
}

/// The cost split into its named terms (nats). `total` is their sum.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// `ln n + ln m`: choice of the two cluster counts.
    pub cluster_counts: f64,
    /// `ln B(n, k_T) + ln B(m, k_S)`: choice of the two partitions.
    pub partitions: f64,
    /// `ln C(N + k_T·k_S − 1, k_T·k_S − 1)`: traversals spread over co-clusters.
    pub cell_frequencies: f64,
    /// `Σ_c ln C(N_c + n_c − 1, n_c − 1)`: traversals of each trajectory cluster spread over its members.
    pub trajectory_frequencies: f64,
    /// `Σ_d ln C(M_d + m_d − 1, m_d − 1)`.
    pub segment_frequencies: f64,
    /// `ln N! − Σ_{c,d} ln N_cd!`.
    pub cell_likelihood: f64,
    /// `Σ_c (ln N_c! − Σ_{i∈c} ln n_i!)`.
    pub trajectory_likelihood: f64,
    /// `Σ_d (ln M_d! − Σ_{j∈d} ln m_j!)`.
    pub segment_likelihood: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn prior(&self) -> f64 {
        self.cluster_counts
            + self.partitions
            + self.cell_frequencies
            + self.trajectory_frequencies
            + self.segment_frequencies
    }

    pub fn likelihood(&self) -> f64 {
        self.cell_likelihood + self.trajectory_likelihood + self.segment_likelihood
    }
}
