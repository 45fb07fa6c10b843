//! Symbolic trajectory datasets and their CSV form.
//!
//! ```text
//! trajectory_id,class,segments
//! 0,1,14;15;93
//! 1,-,7
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{RoadNetwork, SegmentId};

pub type TrajectoryId = u64;

pub const CSV_HEADER: &str = "trajectory_id,class,segments";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: TrajectoryId,
    pub label: Option<String>,
    /// Segment ids in travel order; never empty.
    pub segments: Vec<SegmentId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryDataset {
    pub trajectories: Vec<Trajectory>,
}

impl TrajectoryDataset {
    pub fn new(trajectories: Vec<Trajectory>) -> Self {
        TrajectoryDataset { trajectories }
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Ground-truth labels in dataset order, if every trajectory has one.
    pub fn labels(&self) -> Option<Vec<&str>> {
        self.trajectories.iter().map(|t| t.label.as_deref()).collect()
    }

    /// Checks that every trajectory is a non-empty, head-to-tail connected
    /// path over known segments.
    pub fn validate(&self, net: &RoadNetwork) -> Result<()> {
        for t in &self.trajectories {
            if t.segments.is_empty() {
                return Err(Error::InvalidTrajectory {
                    trajectory: t.id,
                    msg: "empty segment sequence".into(),
                });
            }
            if let Some(&bad) = t.segments.iter().find(|&&s| !net.contains_segment(s)) {
                return Err(Error::InvalidTrajectory {
                    trajectory: t.id,
                    msg: format!("unknown segment id {bad}"),
                });
            }
            if !net.is_connected_path(&t.segments) {
                return Err(Error::InvalidTrajectory {
                    trajectory: t.id,
                    msg: "segments are not head-to-tail connected".into(),
                });
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for t in &self.trajectories {
            let label = match &t.label {
                Some(l) if l.is_empty() || l == "-" || l.contains([',', '\n', '\r']) => {
                    return Err(Error::InvalidTrajectory {
                        trajectory: t.id,
                        msg: format!("label {l:?} cannot be written to CSV"),
                    })
                }
                Some(l) => l.as_str(),
                None => "-",
            };
            let _ = write!(out, "{},{},", t.id, label);
            for (i, s) in t.segments.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                let _ = write!(out, "{s}");
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::parse(origin, 1, format!("expected header {CSV_HEADER:?}"))),
        }
        let mut seen = HashSet::new();
        let mut trajectories = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(origin, lineno, "expected 3 comma-separated fields"));
            }
            let id: TrajectoryId = fields[0]
                .trim()
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad trajectory id {:?}", fields[0])))?;
            if !seen.insert(id) {
                return Err(Error::parse(origin, lineno, format!("duplicate trajectory id {id}")));
            }
            let label = match fields[1].trim() {
                "-" => None,
                "" => return Err(Error::parse(origin, lineno, "empty class label (use '-')")),
                l => Some(l.to_string()),
            };
            let segments = fields[2]
                .split(';')
                .map(|s| {
                    s.trim()
                        .parse::<SegmentId>()
                        .map_err(|_| Error::parse(origin, lineno, format!("bad segment id {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            trajectories.push(Trajectory { id, label, segments });
        }
        Ok(TrajectoryDataset { trajectories })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Loads a dataset; when `net` is given every trajectory is validated against it.
    pub fn load(path: impl AsRef<Path>, net: Option<&RoadNetwork>) -> Result<Self> {
        let path = path.as_ref();
        let ds = Self::from_csv(&fs::read_to_string(path)?, &path.display().to_string())?;
        if let Some(net) = net {
            ds.validate(net)?;
        }
        Ok(ds)
    }
}
