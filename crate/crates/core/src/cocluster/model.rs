use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bigraph::TraversalMatrix;
use crate::error::{Error, Result};
use crate::generator::TrajectoryId;
use crate::network::SegmentId;
use crate::partition::Partition;

use super::criterion::{CostBreakdown, CostTables};

/// Which dimension of the traversal matrix a clustering operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Trajectory,
    Segment,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Trajectory, Side::Segment];

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    pub(crate) fn other(self) -> Side {
        match self {
            Side::Trajectory => Side::Segment,
            Side::Segment => Side::Trajectory,
        }
    }
}

/// A traversal matrix with its cost tables; shared by all models over it.
#[derive(Debug)]
pub struct Problem {
    matrix: TraversalMatrix,
    tables: CostTables,
}

impl Problem {
    pub fn new(matrix: TraversalMatrix) -> Arc<Self> {
        let tables = CostTables::new(&matrix);
        Arc::new(Problem { matrix, tables })
    }

    pub fn matrix(&self) -> &TraversalMatrix {
        &self.matrix
    }

    pub fn tables(&self) -> &CostTables {
        &self.tables
    }

    fn n_items(&self, side: Side) -> usize {
        match side {
            Side::Trajectory => self.matrix.n_rows(),
            Side::Segment => self.matrix.n_cols(),
        }
    }

    /// `(other-side item, count)` entries of one item.
    fn entries(&self, side: Side, item: usize) -> &[(usize, u32)] {
        match side {
            Side::Trajectory => self.matrix.row(item),
            Side::Segment => self.matrix.col(item),
        }
    }

    fn item_total(&self, side: Side, item: usize) -> u64 {
        match side {
            Side::Trajectory => self.matrix.row_total(item),
            Side::Segment => self.matrix.col_total(item),
        }
    }
}

/// Cluster bookkeeping of one side. Cluster ids are slots; merged or
/// emptied slots are marked dead and never reused within a run.
#[derive(Clone, Debug)]
pub(crate) struct SideState {
    pub(crate) assign: Vec<usize>,
    pub(crate) members: Vec<Vec<usize>>,
    pub(crate) total: Vec<u64>,
    pub(crate) alive: Vec<bool>,
    pub(crate) k: usize,
    /// Per slot: other-side slot -> co-cluster traversal count (non-zero only).
    pub(crate) cells: Vec<BTreeMap<usize, u64>>,
}

impl SideState {
    fn from_labels(labels: &[usize]) -> Self {
        let p = Partition::new(labels);
        let k = p.k();
        SideState {
            assign: p.assignment().to_vec(),
            members: p.clusters(),
            total: vec![0; k],
            alive: vec![true; k],
            k,
            cells: vec![BTreeMap::new(); k],
        }
    }

    pub(crate) fn alive_slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(move |&c| self.alive[c])
    }
}

/// A co-clustering: one partition per side plus the co-cluster counts.
#[derive(Clone, Debug)]
pub struct CoClusterModel {
    problem: Arc<Problem>,
    pub(crate) sides: [SideState; 2],
}

impl CoClusterModel {
    /// Model from arbitrary cluster labels per trajectory and per segment.
    pub fn new(problem: Arc<Problem>, trajectory_labels: &[usize], segment_labels: &[usize]) -> Result<Self> {
        if trajectory_labels.len() != problem.matrix.n_rows() || segment_labels.len() != problem.matrix.n_cols() {
            return Err(Error::PartitionMismatch(format!(
                "labels for {}x{} items, matrix is {}x{}",
                trajectory_labels.len(),
                segment_labels.len(),
                problem.matrix.n_rows(),
                problem.matrix.n_cols()
            )));
        }
        let mut rows = SideState::from_labels(trajectory_labels);
        let mut cols = SideState::from_labels(segment_labels);
        let m = &problem.matrix;
        for i in 0..m.n_rows() {
            let c = rows.assign[i];
            for &(j, x) in m.row(i) {
                let d = cols.assign[j];
                let x = x as u64;
                rows.total[c] += x;
                cols.total[d] += x;
                *rows.cells[c].entry(d).or_default() += x;
                *cols.cells[d].entry(c).or_default() += x;
            }
        }
        Ok(CoClusterModel {
            problem,
            sides: [rows, cols],
        })
    }

    /// One trajectory and one segment per cluster.
    pub fn finest(problem: Arc<Problem>) -> Self {
        let n: Vec<usize> = (0..problem.matrix.n_rows()).collect();
        let m: Vec<usize> = (0..problem.matrix.n_cols()).collect();
        Self::new(problem, &n, &m).expect("sizes match")
    }

    /// A single cluster per side.
    pub fn coarsest(problem: Arc<Problem>) -> Self {
        let n = vec![0; problem.matrix.n_rows()];
        let m = vec![0; problem.matrix.n_cols()];
        Self::new(problem, &n, &m).expect("sizes match")
    }

    pub fn problem(&self) -> &Arc<Problem> {
        &self.problem
    }

    pub fn matrix(&self) -> &TraversalMatrix {
        &self.problem.matrix
    }

    pub fn k(&self, side: Side) -> usize {
        self.sides[side.index()].k
    }

    /// Live cluster ids of one side, ascending.
    pub fn cluster_ids(&self, side: Side) -> Vec<usize> {
        self.sides[side.index()].alive_slots().collect()
    }

    pub fn partition(&self, side: Side) -> Partition {
        Partition::new(&self.sides[side.index()].assign)
    }

    pub fn trajectory_partition(&self) -> Partition {
        self.partition(Side::Trajectory)
    }

    pub fn segment_partition(&self) -> Partition {
        self.partition(Side::Segment)
    }

    /// Co-cluster counts `N_cd` in canonical cluster order
    /// (rows: trajectory clusters, columns: segment clusters).
    pub fn contingency(&self) -> Vec<Vec<u64>> {
        let canon = |side: Side| -> BTreeMap<usize, usize> {
            let s = &self.sides[side.index()];
            let mut map = BTreeMap::new();
            for &slot in &s.assign {
                let next = map.len();
                map.entry(slot).or_insert(next);
            }
            map
        };
        let (rmap, cmap) = (canon(Side::Trajectory), canon(Side::Segment));
        let mut table = vec![vec![0u64; cmap.len()]; rmap.len()];
        for (&slot, &r) in &rmap {
            for (&d, &x) in &self.sides[0].cells[slot] {
                table[r][cmap[&d]] = x;
            }
        }
        table
    }

    /// Total cost in nats (lower is better).
    pub fn cost(&self) -> f64 {
        self.breakdown().total
    }

    pub fn breakdown(&self) -> CostBreakdown {
        let t = &self.problem.tables;
        let m = &self.problem.matrix;
        let (n, mm, big_n) = (m.n_rows(), m.n_cols(), m.total());
        let (kt, ks) = (self.sides[0].k, self.sides[1].k);
        let cells = (kt * ks) as u64;
        let mut b = CostBreakdown {
            cluster_counts: (n as f64).ln() + (mm as f64).ln(),
            partitions: t.ln_bell(0, kt) + t.ln_bell(1, ks),
            cell_frequencies: t.ln_choose(big_n + cells - 1, cells - 1),
            cell_likelihood: t.ln_fact(big_n),
            ..CostBreakdown::default()
        };
        for side in Side::BOTH {
            let s = &self.sides[side.index()];
            let mut freq = 0.0;
            let mut lik = 0.0;
            for c in s.alive_slots() {
                let size = s.members[c].len() as u64;
                freq += t.ln_choose(s.total[c] + size - 1, size - 1);
                lik += t.ln_fact(s.total[c]);
                lik -= s.members[c]
                    .iter()
                    .map(|&i| t.ln_fact(self.problem.item_total(side, i)))
                    .sum::<f64>();
            }
            match side {
                Side::Trajectory => {
                    b.trajectory_frequencies = freq;
                    b.trajectory_likelihood = lik;
                }
                Side::Segment => {
                    b.segment_frequencies = freq;
                    b.segment_likelihood = lik;
                }
            }
        }
        for c in self.sides[0].alive_slots() {
            b.cell_likelihood -= self.sides[0].cells[c].values().map(|&x| t.ln_fact(x)).sum::<f64>();
        }
        b.total = b.prior() + b.likelihood();
        b
    }

    /// Cost terms depending only on the two cluster counts.
    pub(crate) fn global_prior(&self, kt: usize, ks: usize) -> f64 {
        let t = &self.problem.tables;
        let cells = (kt * ks) as u64;
        t.ln_bell(0, kt) + t.ln_bell(1, ks) + t.ln_choose(self.problem.matrix.total() + cells - 1, cells - 1)
    }

    fn cluster_term(&self, size: usize, total: u64) -> f64 {
        if size == 0 {
            return 0.0;
        }
        let t = &self.problem.tables;
        t.ln_choose(total + size as u64 - 1, size as u64 - 1) + t.ln_fact(total)
    }

    fn slot_term(&self, side: Side, c: usize) -> f64 {
        let s = &self.sides[side.index()];
        self.cluster_term(s.members[c].len(), s.total[c])
    }

    fn check_slot(&self, side: Side, c: usize) -> Result<()> {
        let s = &self.sides[side.index()];
        if c < s.alive.len() && s.alive[c] {
            Ok(())
        } else {
            Err(Error::UnknownCluster(c))
        }
    }

    /// Cost change of merging clusters `a` and `b` of `side`.
    pub fn merge_delta(&self, side: Side, a: usize, b: usize) -> Result<f64> {
        self.check_slot(side, a)?;
        self.check_slot(side, b)?;
        if a == b {
            return Err(Error::IllegalMerge(format!("cluster {a} merged with itself")));
        }
        Ok(self.local_merge_delta(side, a, b) + self.global_merge_delta(side))
    }

    /// Prior change from losing one cluster on `side`; identical for every pair.
    pub(crate) fn global_merge_delta(&self, side: Side) -> f64 {
        let (kt, ks) = (self.sides[0].k, self.sides[1].k);
        let after = match side {
            Side::Trajectory => self.global_prior(kt - 1, ks),
            Side::Segment => self.global_prior(kt, ks - 1),
        };
        after - self.global_prior(kt, ks)
    }

    /// Merge delta without the count-dependent prior terms.
    pub(crate) fn local_merge_delta(&self, side: Side, a: usize, b: usize) -> f64 {
        let t = &self.problem.tables;
        let s = &self.sides[side.index()];
        let merged = self.cluster_term(s.members[a].len() + s.members[b].len(), s.total[a] + s.total[b]);
        let mut delta = merged - self.slot_term(side, a) - self.slot_term(side, b);
        let (ca, cb) = (&s.cells[a], &s.cells[b]);
        let (small, large) = if ca.len() <= cb.len() { (ca, cb) } else { (cb, ca) };
        for (o, &x) in small {
            if let Some(&y) = large.get(o) {
                delta -= t.ln_fact(x + y) - t.ln_fact(x) - t.ln_fact(y);
            }
        }
        delta
    }

    /// Merges `b` into `a`; returns the other-side clusters whose counts changed.
    pub(crate) fn apply_merge(&mut self, side: Side, a: usize, b: usize) -> Vec<usize> {
        let (si, oi) = (side.index(), side.other().index());
        let moved = std::mem::take(&mut self.sides[si].members[b]);
        for &i in &moved {
            self.sides[si].assign[i] = a;
        }
        self.sides[si].members[a].extend(moved);
        let tb = std::mem::take(&mut self.sides[si].total[b]);
        self.sides[si].total[a] += tb;
        let cells_b = std::mem::take(&mut self.sides[si].cells[b]);
        for (&o, &x) in &cells_b {
            *self.sides[si].cells[a].entry(o).or_default() += x;
            let other = &mut self.sides[oi].cells[o];
            other.remove(&b);
            *other.entry(a).or_default() += x;
        }
        self.sides[si].alive[b] = false;
        self.sides[si].k -= 1;
        self.sides[si].cells[a].keys().copied().collect()
    }

    /// Aggregated counts of `item` per other-side cluster, ascending by cluster.
    pub(crate) fn profile(&self, side: Side, item: usize) -> Vec<(usize, u64)> {
        let other = &self.sides[side.other().index()];
        let mut prof: Vec<(usize, u64)> = self
            .problem
            .entries(side, item)
            .iter()
            .map(|&(o, x)| (other.assign[o], x as u64))
            .collect();
        prof.sort_unstable_by_key(|&(o, _)| o);
        prof.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        prof
    }

    /// Cost change of moving `item` to cluster `target` (`None`: a new singleton).
    pub fn move_delta(&self, side: Side, item: usize, target: Option<usize>) -> Result<f64> {
        if item >= self.problem.n_items(side) {
            return Err(Error::Config(format!("item {item} out of range")));
        }
        if let Some(t) = target {
            self.check_slot(side, t)?;
        }
        let prof = self.profile(side, item);
        Ok(self.source_delta(side, item, &prof) + self.target_delta(side, item, &prof, target)
            + self.move_prior_delta(side, item, target))
    }

    pub(crate) fn source_delta(&self, side: Side, item: usize, prof: &[(usize, u64)]) -> f64 {
        let t = &self.problem.tables;
        let s = &self.sides[side.index()];
        let c = s.assign[item];
        let ni = self.problem.item_total(side, item);
        let mut d = self.cluster_term(s.members[c].len() - 1, s.total[c] - ni) - self.slot_term(side, c);
        for &(o, p) in prof {
            let x = s.cells[c][&o];
            d -= t.ln_fact(x - p) - t.ln_fact(x);
        }
        d
    }

    pub(crate) fn target_delta(&self, side: Side, item: usize, prof: &[(usize, u64)], target: Option<usize>) -> f64 {
        let t = &self.problem.tables;
        let s = &self.sides[side.index()];
        let ni = self.problem.item_total(side, item);
        match target {
            None => self.cluster_term(1, ni) - prof.iter().map(|&(_, p)| t.ln_fact(p)).sum::<f64>(),
            Some(c) if c == s.assign[item] => -self.source_delta(side, item, prof),
            Some(c) => {
                let mut d = self.cluster_term(s.members[c].len() + 1, s.total[c] + ni) - self.slot_term(side, c);
                for &(o, p) in prof {
                    let x = s.cells[c].get(&o).copied().unwrap_or(0);
                    d -= t.ln_fact(x + p) - t.ln_fact(x);
                }
                d
            }
        }
    }

    pub(crate) fn move_prior_delta(&self, side: Side, item: usize, target: Option<usize>) -> f64 {
        let s = &self.sides[side.index()];
        if target == Some(s.assign[item]) {
            return 0.0;
        }
        let mut k = s.k as isize;
        if s.members[s.assign[item]].len() == 1 {
            k -= 1;
        }
        if target.is_none() {
            k += 1;
        }
        let (kt, ks) = (self.sides[0].k, self.sides[1].k);
        let after = match side {
            Side::Trajectory => self.global_prior(k as usize, ks),
            Side::Segment => self.global_prior(kt, k as usize),
        };
        after - self.global_prior(kt, ks)
    }

    /// Moves `item`; returns its new cluster slot. Emptied clusters die at once.
    pub(crate) fn apply_move(&mut self, side: Side, item: usize, target: Option<usize>) -> usize {
        let (si, oi) = (side.index(), side.other().index());
        let prof = self.profile(side, item);
        let ni = self.problem.item_total(side, item);
        let src = self.sides[si].assign[item];
        let dst = match target {
            Some(c) => c,
            None => {
                let s = &mut self.sides[si];
                s.members.push(Vec::new());
                s.total.push(0);
                s.alive.push(true);
                s.cells.push(BTreeMap::new());
                s.k += 1;
                s.members.len() - 1
            }
        };
        if dst == src {
            return src;
        }
        {
            let s = &mut self.sides[si];
            s.assign[item] = dst;
            s.members[src].retain(|&x| x != item);
            s.members[dst].push(item);
            s.total[src] -= ni;
            s.total[dst] += ni;
        }
        for &(o, p) in &prof {
            for (slot, add) in [(src, false), (dst, true)] {
                let row = &mut self.sides[si].cells[slot];
                let x = row.entry(o).or_default();
                if add {
                    *x += p;
                } else {
                    *x -= p;
                }
                let x = *x;
                if x == 0 {
                    row.remove(&o);
                    self.sides[oi].cells[o].remove(&slot);
                } else {
                    self.sides[oi].cells[o].insert(slot, x);
                }
            }
        }
        if self.sides[si].members[src].is_empty() {
            let s = &mut self.sides[si];
            s.alive[src] = false;
            s.k -= 1;
        }
        dst
    }

    /// Rebuilds with dense canonical cluster ids.
    pub fn compact(&self) -> Self {
        Self::new(
            self.problem.clone(),
            &self.sides[0].assign,
            &self.sides[1].assign,
        )
        .expect("sizes match")
    }

    /// Recomputes every count from the matrix and compares it with the
    /// incrementally maintained state.
    pub fn audit(&self) -> Result<()> {
        let fresh = self.compact();
        let n_total = self.problem.matrix.total();
        for side in Side::BOTH {
            let (mine, theirs) = (&self.sides[side.index()], &fresh.sides[side.index()]);
            if mine.k != theirs.k || mine.alive_slots().count() != mine.k {
                return Err(Error::Invariant(format!("{side:?} cluster count {} != {}", mine.k, theirs.k)));
            }
            if mine.alive_slots().map(|c| mine.total[c]).sum::<u64>() != n_total {
                return Err(Error::Invariant(format!("{side:?} marginals do not sum to N")));
            }
            for c in mine.alive_slots() {
                let Some(&first) = mine.members[c].first() else {
                    return Err(Error::Invariant(format!("{side:?} cluster {c} is alive but empty")));
                };
                let f = theirs.assign[first];
                let same_members = mine.members[c].len() == theirs.members[f].len()
                    && mine.members[c].iter().all(|&i| mine.assign[i] == c && theirs.assign[i] == f);
                if !same_members || mine.total[c] != theirs.total[f] {
                    return Err(Error::Invariant(format!("{side:?} cluster {c} drifted")));
                }
                let other = &self.sides[side.other().index()];
                let mapped: BTreeMap<usize, u64> = mine.cells[c]
                    .iter()
                    .map(|(&o, &x)| (fresh.sides[side.other().index()].assign[other.members[o][0]], x))
                    .collect();
                if mapped != theirs.cells[f] {
                    return Err(Error::Invariant(format!("{side:?} cluster {c} co-cluster counts drifted")));
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> ModelFile {
        let m = &self.problem.matrix;
        let b = self.breakdown();
        ModelFile {
            trajectory_ids: m.trajectory_ids().to_vec(),
            segment_ids: m.segment_ids().to_vec(),
            k_trajectories: self.k(Side::Trajectory),
            k_segments: self.k(Side::Segment),
            trajectory_clusters: self.trajectory_partition(),
            segment_clusters: self.segment_partition(),
            contingency: self.contingency(),
            total_traversals: m.total(),
            cost: b.total,
            cost_breakdown: b,
        }
    }
}

/// Serialized co-clustering model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub trajectory_ids: Vec<TrajectoryId>,
    pub segment_ids: Vec<SegmentId>,
    pub k_trajectories: usize,
    pub k_segments: usize,
    pub trajectory_clusters: Partition,
    pub segment_clusters: Partition,
    /// `contingency[c][d]`: traversals of segment cluster `d` by trajectory cluster `c`.
    pub contingency: Vec<Vec<u64>>,
    pub total_traversals: u64,
    pub cost: f64,
    pub cost_breakdown: CostBreakdown,
}

impl ModelFile {
    /// Rebuilds the live model over `matrix`, which must carry the same ids.
    pub fn to_model(&self, problem: Arc<Problem>) -> Result<CoClusterModel> {
        let m = problem.matrix();
        if m.trajectory_ids() != self.trajectory_ids.as_slice() || m.segment_ids() != self.segment_ids.as_slice() {
            return Err(Error::ElementMismatch("model ids differ from the matrix ids".into()));
        }
        CoClusterModel::new(
            problem.clone(),
            self.trajectory_clusters.assignment(),
            self.segment_clusters.assignment(),
        )
    }
}
