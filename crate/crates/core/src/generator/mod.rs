//! Labeled synthetic trajectories from the zone-grid scheme.
//!
//! For every class a departure zone and a different arrival zone are drawn
//! from a rectangular grid over the network. Each trajectory of the class is
//! the travel-time shortest path between a uniformly drawn departure vertex
//! and arrival vertex. Classes may share zones, so corridors overlap.
//!
//! Randomness: class `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `c`, so appending a class leaves earlier classes untouched.

mod dataset;

pub use dataset::{Trajectory, TrajectoryDataset, TrajectoryId, CSV_HEADER};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{RoadNetwork, ZoneGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub classes: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub seed: u64,
    pub max_attempts: usize,
    /// Fixed class sizes instead of uniform draws in `[min_size, max_size]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_sizes: Option<Vec<usize>>,
    /// Fixed (departure, arrival) zones instead of random draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone_pairs: Option<Vec<(usize, usize)>>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            classes: 5,
            grid_rows: 10,
            grid_cols: 10,
            min_size: 10,
            max_size: 20,
            seed: 0,
            max_attempts: 1000,
            class_sizes: None,
            zone_pairs: None,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let cells = self.grid_rows * self.grid_cols;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.classes == 0 {
            return bad("class count must be >= 1".into());
        }
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return bad("grid dimensions must be >= 1".into());
        }
        if self.min_size == 0 || self.min_size > self.max_size {
            return bad(format!(
                "need 1 <= min-size <= max-size, got {}..{}",
                self.min_size, self.max_size
            ));
        }
        if self.classes > cells * cells.saturating_sub(1) {
            return bad(format!(
                "{} classes exceed the {} distinct zone pairs of a {}x{} grid",
                self.classes,
                cells * cells.saturating_sub(1),
                self.grid_rows,
                self.grid_cols
            ));
        }
        if self.max_attempts == 0 {
            return bad("max attempts must be >= 1".into());
        }
        if let Some(sizes) = &self.class_sizes {
            if sizes.len() != self.classes || sizes.contains(&0) {
                return bad(format!(
                    "class sizes must be {} positive values",
                    self.classes
                ));
            }
        }
        if let Some(pairs) = &self.zone_pairs {
            if pairs.len() != self.classes {
                return bad(format!("expected {} zone pairs", self.classes));
            }
            if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a == b || a >= cells || b >= cells) {
                return bad(format!("invalid zone pair ({a}, {b})"));
            }
        }
        Ok(())
    }
}

/// What was drawn for one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPlan {
    pub label: String,
    pub departure_zone: usize,
    pub arrival_zone: usize,
    pub size: usize,
}

pub fn generate(net: &RoadNetwork, cfg: &GeneratorConfig) -> Result<TrajectoryDataset> {
    generate_detailed(net, cfg).map(|(ds, _)| ds)
}

/// Like [`generate`], also returning the per-class draws.
pub fn generate_detailed(
    net: &RoadNetwork,
    cfg: &GeneratorConfig,
) -> Result<(TrajectoryDataset, Vec<ClassPlan>)> {
    cfg.validate()?;
    let grid = ZoneGrid::build(net, cfg.grid_rows, cfg.grid_cols)?;
    let occupied = grid.cells().iter().filter(|c| !c.is_empty()).count();
    if occupied < 2 {
        return Err(Error::ZonesExhausted(format!(
            "only {occupied} of {} zones contain vertices",
            grid.len()
        )));
    }

    let mut trajectories = Vec::new();
    let mut plans = Vec::with_capacity(cfg.classes);
    for class in 0..cfg.classes {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(class as u64);
        let (dep, arr) = match &cfg.zone_pairs {
            Some(pairs) => {
                let (dep, arr) = pairs[class];
                if grid.cell(dep).is_empty() || grid.cell(arr).is_empty() {
                    return Err(Error::ZonesExhausted(format!(
                        "fixed zone pair ({dep}, {arr}) has an empty zone"
                    )));
                }
                (dep, arr)
            }
            None => draw_zone_pair(&grid, &mut rng, cfg.max_attempts)?,
        };
        let size = match &cfg.class_sizes {
            Some(sizes) => sizes[class],
            None => rng.gen_range(cfg.min_size..=cfg.max_size),
        };
        let label = (class + 1).to_string();
        let (from_cell, to_cell) = (grid.cell(dep), grid.cell(arr));
        for _ in 0..size {
            let mut route = None;
            for _ in 0..cfg.max_attempts {
                let a = from_cell[rng.gen_range(0..from_cell.len())];
                let b = to_cell[rng.gen_range(0..to_cell.len())];
                if let Some(r) = net.shortest_path(a, b)? {
                    if !r.segments.is_empty() {
                        route = Some(r);
                        break;
                    }
                }
            }
            let route = route.ok_or(Error::Unreachable {
                from_zone: dep,
                to_zone: arr,
                attempts: cfg.max_attempts,
            })?;
            trajectories.push(Trajectory {
                id: trajectories.len() as TrajectoryId,
                label: Some(label.clone()),
                segments: route.segments,
            });
        }
        plans.push(ClassPlan {
            label,
            departure_zone: dep,
            arrival_zone: arr,
            size,
        });
    }
    Ok((TrajectoryDataset::new(trajectories), plans))
}

fn draw_zone_pair(grid: &ZoneGrid, rng: &mut ChaCha8Rng, attempts: usize) -> Result<(usize, usize)> {
    for _ in 0..attempts {
        let dep = rng.gen_range(0..grid.len());
        let arr = rng.gen_range(0..grid.len());
        if dep != arr && !grid.cell(dep).is_empty() && !grid.cell(arr).is_empty() {
            return Ok((dep, arr));
        }
    }
    Err(Error::ZonesExhausted(format!(
        "no pair of distinct non-empty zones after {attempts} draws"
    )))
}
