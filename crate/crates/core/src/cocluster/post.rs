use rand::seq::SliceRandom;
use rand::Rng;

use super::greedy::MIN_GAIN;
use super::model::{CoClusterModel, Side};

/// Single-item relocation passes over both sides in random order. Each item
/// goes to the cluster (or a fresh singleton) that lowers the cost most.
/// Stops after a pass without improvement or after `max_passes` passes.
pub fn post_optimize<R: Rng + ?Sized>(model: &CoClusterModel, max_passes: usize, rng: &mut R) -> CoClusterModel {
    let mut model = model.clone();
    let n = model.matrix().n_rows();
    let m = model.matrix().n_cols();
    let mut order: Vec<(Side, usize)> = (0..n)
        .map(|i| (Side::Trajectory, i))
        .chain((0..m).map(|j| (Side::Segment, j)))
        .collect();

    for _ in 0..max_passes {
        order.shuffle(rng);
        let mut improved = false;
        for &(side, item) in &order {
            if let Some(target) = best_move(&model, side, item) {
                model.apply_move(side, item, target);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    model.compact()
}

/// The improving move with the lowest delta; ties go to the smallest
/// cluster id, then to a fresh singleton.
fn best_move(model: &CoClusterModel, side: Side, item: usize) -> Option<Option<usize>> {
    let s = &model.sides[side.index()];
    let source = s.assign[item];
    let prof = model.profile(side, item);
    let leave = model.source_delta(side, item, &prof);
    let mut best: Option<(f64, Option<usize>)> = None;
    let candidates = s.alive_slots().filter(|&c| c != source).map(Some);
    let singleton = (s.members[source].len() > 1).then_some(None);
    for target in candidates.chain(singleton) {
        let delta = leave + model.target_delta(side, item, &prof, target) + model.move_prior_delta(side, item, target);
        if delta < -MIN_GAIN && best.is_none_or(|(d, _)| delta < d) {
            best = Some((delta, target));
        }
    }
    best.map(|(_, t)| t)
}
