use std::io;

use thiserror::Error;

/// Errors raised across the toolkit.
///
/// `Invariant` is reserved for internal consistency failures (an audit
/// recompute disagreeing with incrementally maintained state); every other
/// variant describes bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("segment {segment} references unknown vertex {vertex}")]
    DanglingEndpoint { segment: u64, vertex: u64 },
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u64 },
    #[error("segment {segment}: {field} must be > 0 (got {value})")]
    NonPositive {
        segment: u64,
        field: &'static str,
        value: f64,
    },
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("unknown segment id {0}")]
    UnknownSegment(u64),
    #[error("empty network")]
    EmptyNetwork,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("zone resampling exhausted: {0}")]
    ZonesExhausted(String),
    #[error("no reachable vertex pair between zones {from_zone} and {to_zone} after {attempts} attempts")]
    Unreachable {
        from_zone: usize,
        to_zone: usize,
        attempts: usize,
    },
    #[error("trajectory {trajectory}: {msg}")]
    InvalidTrajectory { trajectory: u64, msg: String },
    #[error("trajectory {trajectory} does not visit segment {segment}")]
    NotVisited { trajectory: u64, segment: u64 },
    #[error("partition does not match graph: {0}")]
    PartitionMismatch(String),
    #[error("element sets differ: {0}")]
    ElementMismatch(String),
    #[error("graph has zero total edge weight")]
    ZeroWeight,
    #[error("unknown cluster id {0}")]
    UnknownCluster(usize),
    #[error("illegal merge: {0}")]
    IllegalMerge(String),
    #[error("target cluster count {target} out of range 1..={max}")]
    TargetOutOfRange { target: usize, max: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
