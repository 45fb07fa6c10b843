//! Deterministic synthetic road networks.
//!
//! The district layout is a grid of small street grids ("districts") joined
//! by single two-way bridges between horizontally and vertically adjacent
//! districts. Each district's middle row and column are faster main streets.
//! A zone grid with the same shape as the district grid puts every district
//! in its own zone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RoadNetwork, Segment, Vertex};

#[derive(Clone, Debug)]
pub struct DistrictLayout {
    pub district_rows: usize,
    pub district_cols: usize,
    /// Intersections per district side.
    pub block: usize,
    /// Street spacing in meters.
    pub spacing: f64,
    /// Distance between facing district borders (bridge length).
    pub gap: f64,
    /// Maximum coordinate perturbation of interior intersections.
    pub jitter: f64,
    pub street_speed: f64,
    pub main_speed: f64,
    pub bridge_speed: f64,
    pub seed: u64,
}

impl Default for DistrictLayout {
    fn default() -> Self {
        DistrictLayout {
            district_rows: 4,
            district_cols: 4,
            block: 10,
            spacing: 100.0,
            gap: 300.0,
            jitter: 20.0,
            street_speed: 30.0,
            main_speed: 50.0,
            bridge_speed: 70.0,
            seed: 2013,
        }
    }
}

impl DistrictLayout {
    pub fn build(&self) -> RoadNetwork {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let b = self.block;
        let width = (b - 1) as f64 * self.spacing;
        let stride = width + self.gap;
        let districts = self.district_rows * self.district_cols;
        let vid = |d: usize, i: usize, j: usize| (d * b * b + i * b + j) as u64;

        let mut vertices = Vec::with_capacity(districts * b * b);
        for dr in 0..self.district_rows {
            for dc in 0..self.district_cols {
                let d = dr * self.district_cols + dc;
                for i in 0..b {
                    for j in 0..b {
                        let interior = i > 0 && j > 0 && i + 1 < b && j + 1 < b;
                        let (jx, jy) = if interior && self.jitter > 0.0 {
                            (
                                rng.gen_range(-self.jitter..=self.jitter),
                                rng.gen_range(-self.jitter..=self.jitter),
                            )
                        } else {
                            (0.0, 0.0)
                        };
                        vertices.push(Vertex {
                            id: vid(d, i, j),
                            x: round_mm(dc as f64 * stride + j as f64 * self.spacing + jx),
                            y: round_mm(dr as f64 * stride + i as f64 * self.spacing + jy),
                        });
                    }
                }
            }
        }

        let mut segments = Vec::new();
        let mut two_way = |a: u64, b_: u64, speed: f64, vertices: &[Vertex]| {
            let (va, vb) = (&vertices[a as usize], &vertices[b_ as usize]);
            let length = round_mm((va.x - vb.x).hypot(va.y - vb.y));
            for (from, to) in [(a, b_), (b_, a)] {
                segments.push(Segment {
                    id: segments.len() as u64,
                    from,
                    to,
                    length,
                    speed,
                });
            }
        };
        let mid = b / 2;
        for d in 0..districts {
            for i in 0..b {
                for j in 0..b {
                    if j + 1 < b {
                        let speed = if i == mid { self.main_speed } else { self.street_speed };
                        two_way(vid(d, i, j), vid(d, i, j + 1), speed, &vertices);
                    }
                    if i + 1 < b {
                        let speed = if j == mid { self.main_speed } else { self.street_speed };
                        two_way(vid(d, i, j), vid(d, i + 1, j), speed, &vertices);
                    }
                }
            }
        }
        for dr in 0..self.district_rows {
            for dc in 0..self.district_cols {
                let d = dr * self.district_cols + dc;
                if dc + 1 < self.district_cols {
                    two_way(vid(d, mid, b - 1), vid(d + 1, mid, 0), self.bridge_speed, &vertices);
                }
                if dr + 1 < self.district_rows {
                    let up = d + self.district_cols;
                    two_way(vid(d, b - 1, mid), vid(up, 0, mid), self.bridge_speed, &vertices);
                }
            }
        }
        RoadNetwork::new(vertices, segments).expect("synthetic layout is valid by construction")
    }
}

fn round_mm(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}
