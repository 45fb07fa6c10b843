//! File interchange between stages: JSON artifacts carry a `provenance`
//! block, and matrix-consuming stages accept either a matrix JSON or a
//! dataset CSV.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use trajcc_core::bigraph::{MatrixFile, TraversalMatrix};
use trajcc_core::generator::TrajectoryDataset;
use trajcc_core::network::RoadNetwork;

use crate::error::CliError;

/// Config echo written into every JSON output. `jobs` is left out on
/// purpose: it never changes results, so it must not change artifacts.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64, args: &impl Serialize) -> Self {
        Provenance {
            tool: "trajcc",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config: serde_json::to_value(args).expect("arguments serialize"),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json(provenance: &Provenance, body: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Envelope { provenance, body })?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(path: &Path, provenance: &Provenance, body: &impl Serialize) -> Result<(), CliError> {
    write(path, to_json(provenance, body)?)
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses a JSON artifact, ignoring its provenance block.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let mut value = read_value(path)?;
    if let Value::Object(map) = &mut value {
        map.remove("provenance");
    }
    serde_json::from_value(value).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn read_value(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_network(path: &Path) -> Result<RoadNetwork, CliError> {
    Ok(RoadNetwork::parse(&read_to_string(path)?, &path.display().to_string())?)
}

pub fn load_dataset(path: &Path) -> Result<TrajectoryDataset, CliError> {
    Ok(TrajectoryDataset::from_csv(&read_to_string(path)?, &path.display().to_string())?)
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// A traversal matrix from a `matrix` artifact (`.json`) or a dataset CSV.
pub fn load_matrix(path: &Path) -> Result<TraversalMatrix, CliError> {
    if is_json(path) {
        let file: MatrixFile = read_json(path)?;
        Ok(TraversalMatrix::from_file(&file)?)
    } else {
        Ok(TraversalMatrix::from_dataset(&load_dataset(path)?)?)
    }
}

pub fn with_json_extension(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Fails early, before any work, when an input file is missing.
pub fn require_inputs<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<(), CliError> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::MissingInput(p.to_path_buf()));
        }
    }
    Ok(())
}
