use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Cluster vehicle trajectories and road segments from a bipartite traversal
/// graph, by modularity on a projected similarity graph or by MAP
/// co-clustering.
#[derive(Parser, Debug)]
#[command(name = "trajcc", version)]
pub struct Cli {
    /// Master seed; every random choice of a run derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for co-clustering restarts (0 = all cores). Results
    /// do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a labeled synthetic trajectory dataset (CSV).
    Generate(GenerateArgs),
    /// Build the trajectory x segment traversal matrix (JSON).
    Matrix(MatrixArgs),
    /// Project the bipartite graph onto trajectories or segments (edge CSV + JSON sidecar).
    Project(ProjectArgs),
    /// Hierarchical modularity clustering of a projected graph (JSON).
    Cluster(ClusterArgs),
    /// MAP co-clustering of trajectories and segments (JSON model).
    Cocluster(CoclusterArgs),
    /// Compare a predicted trajectory partition with ground-truth classes.
    Evaluate(EvaluateArgs),
    /// Mutual-information and crossed-matrix reports for a co-clustering model.
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    /// Road network file.
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    /// Zone grid rows.
    #[arg(long, default_value_t = 10)]
    pub grid_rows: usize,
    /// Zone grid columns.
    #[arg(long, default_value_t = 10)]
    pub grid_cols: usize,
    /// Smallest class size (inclusive).
    #[arg(long, default_value_t = 10)]
    pub min_size: usize,
    /// Largest class size (inclusive).
    #[arg(long, default_value_t = 20)]
    pub max_size: usize,
    /// Fixed class sizes instead of drawing them, e.g. `17,17,17,17,17`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_sizes: Option<Vec<usize>>,
    /// Fixed departure:arrival zone per class instead of drawing them, e.g. `0:1,2:3`.
    #[arg(long, value_delimiter = ',', value_parser = parse_zone_pair)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zone_pairs: Option<Vec<(usize, usize)>>,
    /// Vertex-pair draws per trajectory before the class's zones are redrawn.
    #[arg(long, default_value_t = 1000)]
    pub max_attempts: usize,
    /// Dataset CSV to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Optional JSON file describing each class (zones, size).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plans: Option<PathBuf>,
}

fn parse_zone_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected FROM:TO, got {s:?}"))?;
    let zone = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad zone index {x:?}"));
    Ok((zone(a)?, zone(b)?))
}

#[derive(Args, Debug, Serialize)]
pub struct MatrixArgs {
    /// Dataset CSV.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Validate every trajectory against this network.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectSide {
    Trajectories,
    Segments,
}

#[derive(Args, Debug, Serialize)]
pub struct ProjectArgs {
    /// Traversal matrix JSON or dataset CSV.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Road network (needed for segment lengths when projecting trajectories).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ProjectSide::Trajectories)]
    pub side: ProjectSide,
    /// Edge list CSV to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// JSON sidecar to write [default: OUTPUT with a .json extension].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterArgs {
    /// Edge list CSV written by `project`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Sidecar of the edge list [default: INPUT with a .json extension].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
    /// Cut the dendrogram at this many clusters instead of at the best modularity.
    #[arg(short, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Single-node refinement passes on the cut (0 disables refinement).
    #[arg(long, default_value_t = 100)]
    pub refine_passes: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CoclusterArgs {
    /// Traversal matrix JSON or dataset CSV.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Perturbed restarts after the first descent.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Pass limit of each post-optimization.
    #[arg(long, default_value_t = 100)]
    pub max_passes: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    /// Co-clustering model or modularity clustering JSON.
    #[arg(long)]
    pub pred: PathBuf,
    /// Labeled dataset CSV.
    #[arg(long)]
    pub truth: PathBuf,
    /// For modularity results: evaluate the dendrogram cut with this many
    /// clusters instead of the stored partition.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<usize>,
    /// Majority share a cluster needs to count as pure.
    #[arg(long, default_value_t = 0.9)]
    pub purity: f64,
    /// JSON to write [default: standard output].
    #[arg(short, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Mi,
    Crossed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Nats,
    Bits,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Co-clustering model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Traversal matrix JSON or dataset CSV the model was fitted on.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Sections to include.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Section::Mi, Section::Crossed])]
    pub sections: Vec<Section>,
    /// Unit of mutual information.
    #[arg(long, value_enum, default_value_t = Unit::Nats)]
    pub unit: Unit,
    /// Block-density image of the crossed matrix (binary PGM).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pgm: Option<PathBuf>,
    /// JSON to write [default: standard output].
    #[arg(short, long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}
