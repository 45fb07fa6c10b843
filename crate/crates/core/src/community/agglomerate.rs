use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::bigraph::SimilarityGraph;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// One agglomeration step. Leaves are `0..n`; the cluster created by merge
/// `i` gets id `n + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub merged: usize,
    /// Modularity change of this merge.
    pub gain: f64,
    /// Modularity after this merge.
    pub q: f64,
    /// Joins two disconnected parts of the graph.
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    /// Modularity of the all-singletons partition.
    initial_q: f64,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn initial_q(&self) -> f64 {
        self.initial_q
    }

    /// Modularity recorded after `prefix` merges.
    pub fn q_after(&self, prefix: usize) -> f64 {
        match prefix {
            0 => self.initial_q,
            p => self.merges[p - 1].q,
        }
    }

    /// Prefix with maximal recorded modularity; ties go to fewer clusters.
    pub fn best_prefix(&self) -> usize {
        (0..=self.merges.len())
            .max_by(|&a, &b| self.q_after(a).total_cmp(&self.q_after(b)).then(a.cmp(&b)))
            .unwrap_or(0)
    }

    pub fn partition_after(&self, prefix: usize) -> Partition {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // Representative leaf of every cluster id seen so far.
        let mut rep: Vec<usize> = (0..self.n).collect();
        for m in &self.merges[..prefix.min(self.merges.len())] {
            let (ra, rb) = (find(&mut parent, rep[m.a]), find(&mut parent, rep[m.b]));
            parent[rb] = ra;
            rep.push(ra);
        }
        let labels: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Partition::new(&labels)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    gain: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Max-heap order: larger gain first, then smaller (a, b).
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy best-merge agglomeration over the whole hierarchy.
///
/// Connected clusters are merged by largest gain (positive gains first, then
/// least negative) until every connected component is a single cluster.
/// Components are then joined by least-negative forced merges so the
/// dendrogram always has `n - 1` merges. Ids are never reused, so a heap
/// entry stays exact for as long as both its clusters are alive.
pub fn agglomerate(g: &SimilarityGraph) -> Result<Dendrogram> {
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::Config("cannot cluster an empty graph".into()));
    }
    let total = g.total_weight();
    // With no edges every gain is zero and Q is taken as 0 throughout.
    let scale = if total > 0.0 { 1.0 / total } else { 0.0 };

    let mut share: Vec<f64> = (0..n).map(|i| g.degree(i) * scale / 2.0).collect();
    let mut links: Vec<BTreeMap<usize, f64>> = (0..n)
        .map(|i| g.neighbors(i).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let gain = |w: f64, sa: f64, sb: f64| w * scale - 2.0 * sa * sb;

    let initial_q: f64 = -share.iter().map(|s| s * s).sum::<f64>();
    let mut q = initial_q;
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    let mut heap = BinaryHeap::new();
    for (a, b, w) in g.edges() {
        heap.push(Candidate { gain: gain(w, share[a], share[b]), a, b });
    }
    while let Some(Candidate { gain: dq, a, b }) = heap.pop() {
        if !alive[a] || !alive[b] {
            continue;
        }
        let z = share.len();
        alive[a] = false;
        alive[b] = false;
        let mut merged_links = std::mem::take(&mut links[a]);
        for (c, w) in std::mem::take(&mut links[b]) {
            *merged_links.entry(c).or_default() += w;
        }
        merged_links.remove(&a);
        merged_links.remove(&b);
        let s = share[a] + share[b];
        for (&c, &w) in &merged_links {
            let lc = &mut links[c];
            lc.remove(&a);
            lc.remove(&b);
            lc.insert(z, w);
            heap.push(Candidate { gain: gain(w, share[c], s), a: c, b: z });
        }
        share.push(s);
        links.push(merged_links);
        alive.push(true);
        q += dq;
        merges.push(Merge { a, b, merged: z, gain: dq, q, forced: false });
    }

    // One cluster per component remains; join the two smallest-degree
    // clusters first, which is the least negative gain available.
    let mut rest: BTreeSet<(Share, usize)> = (0..share.len())
        .filter(|&c| alive[c])
        .map(|c| (Share(share[c]), c))
        .collect();
    while rest.len() > 1 {
        let (Share(sa), a) = rest.pop_first().expect("len > 1");
        let (Share(sb), b) = rest.pop_first().expect("len > 1");
        let (a, b, sa, sb) = if a < b { (a, b, sa, sb) } else { (b, a, sb, sa) };
        let dq = gain(0.0, sa, sb);
        let z = share.len();
        share.push(sa + sb);
        q += dq;
        merges.push(Merge { a, b, merged: z, gain: dq, q, forced: true });
        rest.insert((Share(sa + sb), z));
    }
    Ok(Dendrogram { n, initial_q, merges })
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Share(f64);

impl Eq for Share {}

impl Ord for Share {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for Share {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
