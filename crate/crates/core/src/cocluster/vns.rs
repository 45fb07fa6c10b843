use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

use super::greedy::{greedy, MIN_GAIN};
use super::model::{CoClusterModel, Problem};
use super::post::post_optimize;

/// Restarts in one round all perturb the same incumbent, so a round can run
/// in parallel; the incumbent is updated between rounds. The round size is
/// fixed so results never depend on the thread count.
const ROUND: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VnsConfig {
    /// Perturbed restarts after the descent from the finest model.
    pub restarts: usize,
    pub seed: u64,
    /// Pass limit of each post-optimization.
    pub max_passes: usize,
    /// Worker threads for restarts; 0 uses all available cores.
    pub jobs: usize,
}

impl Default for VnsConfig {
    fn default() -> Self {
        VnsConfig {
            restarts: 10,
            seed: 0,
            max_passes: 100,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VnsOutcome {
    pub model: CoClusterModel,
    /// Index of the run that produced the returned model (0 = finest start).
    pub best_run: usize,
    /// Final cost of every run, by run index.
    pub run_costs: Vec<f64>,
}

/// Variable neighborhood search.
///
/// Run 0 is greedy descent plus post-optimization from the finest model.
/// Each restart then shakes the incumbent: on each side it dissolves a
/// random set of clusters into singletons (how many is drawn log-uniformly
/// between 1 and the cluster count), and descends again from there. A
/// restart replaces the incumbent when it lowers the cost; ties go to the
/// lower run index. Deterministic for a given config, whatever `jobs`.
pub fn vns_search(problem: &Arc<Problem>, cfg: &VnsConfig) -> Result<VnsOutcome> {
    let descend = |start: &CoClusterModel, rng: &mut ChaCha8Rng| post_optimize(&greedy(start), cfg.max_passes, rng);
    let run_rng = |r: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        rng
    };

    let mut best = descend(&CoClusterModel::finest(problem.clone()), &mut run_rng(0));
    let mut best_cost = best.cost();
    let mut best_run = 0;
    let mut run_costs = vec![best_cost];

    let pool = if cfg.jobs == 1 || cfg.restarts == 0 {
        None
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Some(pool)
    };

    let mut next = 1;
    while next <= cfg.restarts {
        let runs: Vec<usize> = (next..=cfg.restarts.min(next + ROUND - 1)).collect();
        let incumbent = &best;
        let restart = |&r: &usize| -> CoClusterModel {
            let mut rng = run_rng(r);
            descend(&shake(incumbent, &mut rng), &mut rng)
        };
        let results: Vec<CoClusterModel> = match &pool {
            Some(pool) => pool.install(|| runs.par_iter().map(restart).collect()),
            None => runs.iter().map(restart).collect(),
        };
        for (r, model) in runs.into_iter().zip(results) {
            let cost = model.cost();
            run_costs.push(cost);
            if cost < best_cost - MIN_GAIN {
                best = model;
                best_cost = cost;
                best_run = r;
            }
        }
        next += ROUND;
    }
    Ok(VnsOutcome {
        model: best,
        best_run,
        run_costs,
    })
}

fn shake(model: &CoClusterModel, rng: &mut ChaCha8Rng) -> CoClusterModel {
    let rows = dissolve(&model.trajectory_partition(), rng);
    let cols = dissolve(&model.segment_partition(), rng);
    CoClusterModel::new(model.problem().clone(), &rows, &cols).expect("sizes match")
}

/// Labels where `ceil(exp(U ln k))` random clusters of `p` become singletons.
fn dissolve(p: &Partition, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k = p.k();
    let u: f64 = rng.gen();
    let count = ((u * (k as f64).ln()).exp().ceil() as usize).clamp(1, k);
    let mut ids: Vec<usize> = (0..k).collect();
    ids.shuffle(rng);
    let chosen: BTreeSet<usize> = ids[..count].iter().copied().collect();
    (0..p.len())
        .map(|i| {
            let c = p.cluster_of(i);
            if chosen.contains(&c) {
                k + i
            } else {
                c
            }
        })
        .collect()
}
