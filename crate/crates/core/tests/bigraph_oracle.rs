//! Projection weights against a dense, formula-literal evaluation.

use proptest::prelude::*;
use trajcc_core::bigraph::{
    project_segments, project_trajectories, segment_contribution, weights, TraversalMatrix,
};
use trajcc_core::network::{RoadNetwork, Segment, Vertex};

fn network(lengths: &[f64]) -> RoadNetwork {
    RoadNetwork::new(
        vec![Vertex { id: 0, x: 0.0, y: 0.0 }],
        lengths
            .iter()
            .enumerate()
            .map(|(id, &length)| Segment { id: id as u64, from: 0, to: 0, length, speed: 10.0 })
            .collect(),
    )
    .unwrap()
}

/// Dense w(s,T) straight from the definition.
fn dense_segment_weights(counts: &[Vec<u32>], lengths: &[f64]) -> Vec<Vec<f64>> {
    let n = counts.len();
    let m = lengths.len();
    (0..n)
        .map(|t| {
            let denom: f64 = (0..m).map(|s| counts[t][s] as f64 * lengths[s]).sum();
            (0..m)
                .map(|s| {
                    if counts[t][s] == 0 {
                        return 0.0;
                    }
                    let df = (0..n).filter(|&u| counts[u][s] > 0).count() as f64;
                    counts[t][s] as f64 * lengths[s] / denom * (n as f64 / df).ln()
                })
                .collect()
        })
        .collect()
}

/// Dense w(T,s), indexed [segment][trajectory].
fn dense_trajectory_weights(counts: &[Vec<u32>]) -> Vec<Vec<f64>> {
    let n = counts.len();
    let m = counts[0].len();
    (0..m)
        .map(|s| {
            let visits: f64 = (0..n).map(|t| counts[t][s] as f64).sum();
            (0..n)
                .map(|t| {
                    if counts[t][s] == 0 {
                        return 0.0;
                    }
                    let distinct = counts[t].iter().filter(|&&c| c > 0).count() as f64;
                    counts[t][s] as f64 / visits * (m as f64 / distinct).ln()
                })
                .collect()
        })
        .collect()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn check_against_dense(counts: &[Vec<u32>], lengths: &[f64]) {
    let m = TraversalMatrix::from_dense(counts).unwrap();
    let net = network(lengths);
    let wt = dense_segment_weights(counts, lengths);
    let g = project_trajectories(&m, &net).unwrap();
    for a in 0..counts.len() {
        for b in 0..counts.len() {
            if a == b {
                assert_eq!(g.weight(a, b), 0.0);
                continue;
            }
            let want = cosine(&wt[a], &wt[b]);
            assert!((g.weight(a, b) - want).abs() < 1e-12, "T{a},T{b}: {} vs {want}", g.weight(a, b));
        }
    }
    let ws = dense_trajectory_weights(counts);
    let g = project_segments(&m);
    for a in 0..lengths.len() {
        for b in 0..lengths.len() {
            if a != b {
                let want = cosine(&ws[a], &ws[b]);
                assert!((g.weight(a, b) - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn three_trajectory_toy() {
    // T1 = [a, b], T2 = [b, c], T3 = [c]
    let counts = vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]];
    let lengths = [120.0, 80.0, 200.0];
    check_against_dense(&counts, &lengths);

    let m = TraversalMatrix::from_dense(&counts).unwrap();
    let g = project_trajectories(&m, &network(&lengths)).unwrap();
    // Hand evaluation: ln(3/2) is the idf of b and c, ln 3 of a.
    let (l3, l32) = (3f64.ln(), 1.5f64.ln());
    let t1 = [120.0 / 200.0 * l3, 80.0 / 200.0 * l32, 0.0];
    let t2 = [0.0, 80.0 / 280.0 * l32, 200.0 / 280.0 * l32];
    let t3 = [0.0, 0.0, l32];
    let hand = |x: &[f64; 3], y: &[f64; 3]| {
        let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        dot / ((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt())
    };
    assert!((g.weight(0, 1) - hand(&t1, &t2)).abs() < 1e-12);
    assert!((g.weight(1, 2) - hand(&t2, &t3)).abs() < 1e-12);
    // T1 and T3 share nothing.
    assert_eq!(g.weight(0, 2), 0.0);
    assert_eq!(g.n_edges(), 2);

    let s = project_segments(&m);
    // Segment a is only visited by T1, segment c by T2 and T3.
    let ws = dense_trajectory_weights(&counts);
    assert!((s.weight(0, 1) - cosine(&ws[0], &ws[1])).abs() < 1e-12);
    assert_eq!(s.weight(0, 2), 0.0);
}

#[test]
fn universal_segments_give_no_edge() {
    // Both trajectories share only segment 0, which everyone visits.
    let counts = vec![vec![1, 1, 0], vec![1, 0, 1]];
    let m = TraversalMatrix::from_dense(&counts).unwrap();
    let g = project_trajectories(&m, &network(&[10.0, 10.0, 10.0])).unwrap();
    assert_eq!(g.n_edges(), 0);
}

#[test]
fn zero_vector_trajectory_is_reported() {
    // T1 visits only the universal segment.
    let counts = vec![vec![1, 0], vec![1, 1]];
    let m = TraversalMatrix::from_dense(&counts).unwrap();
    let g = project_trajectories(&m, &network(&[10.0, 10.0])).unwrap();
    assert_eq!(g.zero_vector_nodes(), &[0]);
    assert!(g.neighbors(0).is_empty());
}

#[test]
fn export_round_trip() {
    let counts = vec![vec![1, 1, 0, 2], vec![0, 1, 1, 0], vec![0, 3, 1, 1]];
    let m = TraversalMatrix::from_dense(&counts).unwrap();
    let g = project_segments(&m);
    let back = trajcc_core::bigraph::SimilarityGraph::from_export(&g.sidecar(), &g.to_csv(), "mem").unwrap();
    assert_eq!(back, g);
}

fn count_matrix() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<f64>)> {
    (2usize..7, 2usize..8).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0u32), 2 => 1u32..3], m), n),
            prop::collection::vec(1.0f64..500.0, m),
        )
            .prop_filter("rows and columns need a traversal", |(c, _)| {
                c.iter().all(|r| r.iter().any(|&x| x > 0))
                    && (0..c[0].len()).all(|j| c.iter().any(|r| r[j] > 0))
            })
    })
}

proptest! {
    #[test]
    fn matches_dense_oracle((counts, lengths) in count_matrix()) {
        check_against_dense(&counts, &lengths);
    }

    #[test]
    fn length_shares_sum_to_one((counts, lengths) in count_matrix()) {
        let n = counts.len() as f64;
        let m = TraversalMatrix::from_dense(&counts).unwrap();
        let net = network(&lengths);
        for i in 0..m.n_rows() {
            // Dividing out the idf recovers the length share.
            let mut share = 0.0;
            for &(j, _) in m.row(i) {
                let idf = (n / m.col(j).len() as f64).ln();
                if idf > 0.0 {
                    share += segment_contribution(&m, &net, i, j).unwrap() / idf;
                } else {
                    share += m.count(i, j) as f64 * lengths[j]
                        / m.row(i).iter().map(|&(k, c)| c as f64 * lengths[k]).sum::<f64>();
                }
            }
            prop_assert!((share - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_bounded_and_consistent((counts, lengths) in count_matrix()) {
        let m = TraversalMatrix::from_dense(&counts).unwrap();
        for g in [project_trajectories(&m, &network(&lengths)).unwrap(), project_segments(&m)] {
            for a in 0..g.n_nodes() {
                prop_assert_eq!(g.weight(a, a), 0.0);
                for &(b, w) in g.neighbors(a) {
                    prop_assert_eq!(g.weight(b, a), w);
                    prop_assert!(w > 0.0 && w <= 1.0 + 1e-12);
                }
            }
        }
        let g = project_trajectories(&m, &network(&lengths)).unwrap();
        for (a, b, _) in g.edges() {
            prop_assert!((0..counts[0].len()).any(|s| counts[a][s] > 0 && counts[b][s] > 0));
        }
    }

    #[test]
    fn scaling_lengths_keeps_similarities((counts, lengths) in count_matrix(), k in 0.01f64..100.0) {
        let m = TraversalMatrix::from_dense(&counts).unwrap();
        let a = project_trajectories(&m, &network(&lengths)).unwrap();
        let scaled: Vec<f64> = lengths.iter().map(|l| l * k).collect();
        let b = project_trajectories(&m, &network(&scaled)).unwrap();
        for i in 0..counts.len() {
            for j in 0..counts.len() {
                prop_assert!((a.weight(i, j) - b.weight(i, j)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn tf_factor_direct() {
    // weights::trajectory_vectors exposes the full vectors; cross-check one.
    let counts = vec![vec![2, 1], vec![0, 1]];
    let m = TraversalMatrix::from_dense(&counts).unwrap();
    let v = weights::trajectory_vectors(&m, &network(&[30.0, 60.0])).unwrap();
    assert!((v[0][0].1 - 60.0 / 120.0 * 2f64.ln()).abs() < 1e-15);
    assert_eq!(v[0][1].1, 0.0);
}
