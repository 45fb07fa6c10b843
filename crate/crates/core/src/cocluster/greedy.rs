use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use super::model::{CoClusterModel, Side};

/// Improvements smaller than this are treated as rounding noise.
pub(crate) const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    local: f64,
    a: usize,
    b: usize,
    stamp: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.local
            .total_cmp(&other.local)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
            .then(self.stamp.cmp(&other.stamp))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy min-heap of merge candidates of one side. An entry is live while
/// both clusters are alive and its stamp matches the pair's latest stamp.
#[derive(Default)]
struct MergeQueue {
    heap: BinaryHeap<Reverse<Candidate>>,
    stamps: HashMap<(usize, usize), u32>,
}

impl MergeQueue {
    fn push(&mut self, model: &CoClusterModel, side: Side, a: usize, b: usize, fresh: bool) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let stamp = if fresh {
            let s = self.stamps.entry((a, b)).or_insert(0);
            *s += 1;
            *s
        } else {
            0
        };
        let local = model.local_merge_delta(side, a, b);
        self.heap.push(Reverse(Candidate { local, a, b, stamp }));
    }

    fn best(&mut self, model: &CoClusterModel, side: Side) -> Option<Candidate> {
        let alive = &model.sides[side.index()].alive;
        while let Some(&Reverse(c)) = self.heap.peek() {
            let current = self.stamps.get(&(c.a, c.b)).copied().unwrap_or(0);
            if alive[c.a] && alive[c.b] && c.stamp == current {
                return Some(c);
            }
            self.heap.pop();
        }
        None
    }
}

/// Agglomerative descent: repeatedly applies the best merge over both sides
/// until a single cluster remains per side, then returns the lowest-cost
/// model along that merge sequence (the start model if no prefix improves
/// on it). Following the sequence past uphill merges lets the search cross
/// small barriers, e.g. on near-uniform tables whose coarsest model is best.
pub fn greedy(model: &CoClusterModel) -> CoClusterModel {
    let start = model.compact();
    let mut model = start.clone();
    let mut merges: Vec<(Side, usize, usize)> = Vec::new();
    let (mut walked, mut best, mut best_len) = (0.0, 0.0, 0);
    let mut queues = [MergeQueue::default(), MergeQueue::default()];
    for side in Side::BOTH {
        let ids = model.cluster_ids(side);
        for (x, &a) in ids.iter().enumerate() {
            for &b in &ids[x + 1..] {
                queues[side.index()].push(&model, side, a, b, false);
            }
        }
    }

    loop {
        let mut choice: Option<(f64, Side, Candidate)> = None;
        for side in Side::BOTH {
            if model.k(side) < 2 {
                continue;
            }
            let Some(c) = queues[side.index()].best(&model, side) else {
                continue;
            };
            let delta = c.local + model.global_merge_delta(side);
            // Ties keep the earlier side, so the trajectory side wins them.
            if choice.as_ref().is_none_or(|&(d, _, _)| delta < d) {
                choice = Some((delta, side, c));
            }
        }
        let Some((delta, side, c)) = choice else { break };
        walked += delta;
        merges.push((side, c.a, c.b));
        if walked < best - MIN_GAIN {
            best = walked;
            best_len = merges.len();
        }

        let other = side.other();
        let os = &model.sides[other.index()];
        let touched: BTreeSet<usize> = model.sides[side.index()].cells[c.a]
            .keys()
            .chain(model.sides[side.index()].cells[c.b].keys())
            .copied()
            .collect();
        debug_assert!(touched.iter().all(|&o| os.alive[o]));
        model.apply_merge(side, c.a, c.b);

        for x in model.cluster_ids(side) {
            if x != c.a {
                queues[side.index()].push(&model, side, c.a, x, true);
            }
        }
        // Other-side pairs whose shared cells involved either merged cluster.
        let touched: Vec<usize> = touched.into_iter().collect();
        for (i, &u) in touched.iter().enumerate() {
            for &v in &touched[i + 1..] {
                queues[other.index()].push(&model, other, u, v, true);
            }
        }
    }
    let mut model = start;
    for &(side, a, b) in &merges[..best_len] {
        model.apply_merge(side, a, b);
    }
    model.compact()
}
