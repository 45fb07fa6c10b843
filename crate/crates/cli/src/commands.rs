use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use trajcc_core::analysis::{adjusted_rand_index, confusion, crossed_matrix, mutual_information, ContingencyReport, CrossedMatrix, InfoUnit, MiReport};
use trajcc_core::bigraph::{project_segments, project_trajectories, GraphSidecar, NodeKind, SimilarityGraph};
use trajcc_core::cocluster::{vns_search, CostBreakdown, ModelFile, Problem, VnsConfig};
use trajcc_core::community::{agglomerate, cut, modularity, refine, CutTarget, Dendrogram};
use trajcc_core::generator::{generate_detailed, ClassPlan, GeneratorConfig, TrajectoryId};
use trajcc_core::{Error, Partition};

use crate::args::*;
use crate::artifact::{self, Provenance};
use crate::error::CliError;

/// What a subcommand hands back: the summary line and, for commands
/// without `-o`, the JSON document destined for standard output.
pub struct Outcome {
    pub summary: String,
    pub stdout: Option<String>,
}

impl Outcome {
    fn summary(summary: String) -> Self {
        Outcome { summary, stdout: None }
    }
}

/// Writes to `output` when given, otherwise returns the document for stdout.
fn emit(output: Option<&Path>, provenance: &Provenance, body: &impl Serialize, summary: String) -> Result<Outcome, CliError> {
    match output {
        Some(path) => {
            artifact::write_json(path, provenance, body)?;
            Ok(Outcome::summary(format!("{summary} -> {}", path.display())))
        }
        None => Ok(Outcome { summary, stdout: Some(artifact::to_json(provenance, body)?) }),
    }
}

pub fn generate(a: &GenerateArgs, seed: u64) -> Result<Outcome, CliError> {
    artifact::require_inputs([a.network.as_path()])?;
    let net = artifact::load_network(&a.network)?;
    let cfg = GeneratorConfig {
        classes: a.classes,
        grid_rows: a.grid_rows,
        grid_cols: a.grid_cols,
        min_size: a.min_size,
        max_size: a.max_size,
        seed,
        max_attempts: a.max_attempts,
        class_sizes: a.class_sizes.clone(),
        zone_pairs: a.zone_pairs.clone(),
    };
    let (ds, plans) = generate_detailed(&net, &cfg)?;
    artifact::write(&a.output, ds.to_csv()?)?;
    if let Some(path) = &a.plans {
        #[derive(Serialize)]
        struct Plans<'a> {
            classes: &'a [ClassPlan],
        }
        artifact::write_json(path, &Provenance::new("generate", seed, a), &Plans { classes: &plans })?;
    }
    let traversals: usize = ds.trajectories.iter().map(|t| t.segments.len()).sum();
    Ok(Outcome::summary(format!(
        "generate: {} trajectories in {} classes, {} traversals -> {}",
        ds.len(),
        plans.len(),
        traversals,
        a.output.display()
    )))
}

pub fn matrix(a: &MatrixArgs, seed: u64) -> Result<Outcome, CliError> {
    artifact::require_inputs([Some(a.input.as_path()), a.network.as_deref()].into_iter().flatten())?;
    let ds = artifact::load_dataset(&a.input)?;
    if let Some(path) = &a.network {
        ds.validate(&artifact::load_network(path)?)?;
    }
    let m = trajcc_core::bigraph::TraversalMatrix::from_dataset(&ds)?;
    artifact::write_json(&a.output, &Provenance::new("matrix", seed, a), &m.to_file())?;
    Ok(Outcome::summary(format!(
        "matrix: {} trajectories x {} segments, {} traversals in {} cells -> {}",
        m.n_rows(),
        m.n_cols(),
        m.total(),
        m.nnz(),
        a.output.display()
    )))
}

pub fn project(a: &ProjectArgs, seed: u64) -> Result<Outcome, CliError> {
    artifact::require_inputs([Some(a.input.as_path()), a.network.as_deref()].into_iter().flatten())?;
    let m = artifact::load_matrix(&a.input)?;
    let g = match a.side {
        ProjectSide::Trajectories => {
            let path = a
                .network
                .as_ref()
                .ok_or_else(|| CliError::Usage("--network is required to project trajectories".into()))?;
            project_trajectories(&m, &artifact::load_network(path)?)?
        }
        ProjectSide::Segments => project_segments(&m),
    };
    let sidecar = a.sidecar.clone().unwrap_or_else(|| artifact::with_json_extension(&a.output));
    if sidecar == a.output {
        return Err(CliError::Usage("sidecar path equals the edge list path".into()));
    }
    artifact::write(&a.output, g.to_csv())?;
    artifact::write_json(&sidecar, &Provenance::new("project", seed, a), &g.sidecar())?;
    Ok(Outcome::summary(format!(
        "project: {} graph, {} nodes, {} edges, {} zero-vector nodes -> {}",
        kind_name(g.kind()),
        g.n_nodes(),
        g.n_edges(),
        g.zero_vector_nodes().len(),
        a.output.display()
    )))
}

fn kind_name(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Trajectory => "trajectory",
        NodeKind::Segment => "segment",
    }
}

/// Output of `cluster`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ClusterFile {
    pub kind: NodeKind,
    pub node_ids: Vec<u64>,
    pub target: CutTarget,
    pub refine_passes: usize,
    pub k: usize,
    /// Modularity of the dendrogram cut before refinement.
    pub cut_modularity: f64,
    pub modularity: f64,
    pub assignment: Partition,
    pub dendrogram: Dendrogram,
}

pub fn cluster(a: &ClusterArgs, seed: u64) -> Result<Outcome, CliError> {
    let sidecar_path = a.sidecar.clone().unwrap_or_else(|| artifact::with_json_extension(&a.input));
    artifact::require_inputs([a.input.as_path(), sidecar_path.as_path()])?;
    let sidecar: GraphSidecar = artifact::read_json(&sidecar_path)?;
    let csv = artifact::read_to_string(&a.input)?;
    let g = SimilarityGraph::from_export(&sidecar, &csv, &a.input.display().to_string())?;
    let target = a.k.map_or(CutTarget::BestQ, CutTarget::Clusters);
    let d = agglomerate(&g)?;
    let cut_p = cut(&d, target)?;
    let cut_q = modularity(&g, &cut_p)?;
    let p = if a.refine_passes > 0 { refine(&g, &cut_p, a.refine_passes)? } else { cut_p };
    let q = modularity(&g, &p)?;
    let file = ClusterFile {
        kind: g.kind(),
        node_ids: g.node_ids().to_vec(),
        target,
        refine_passes: a.refine_passes,
        k: p.k(),
        cut_modularity: cut_q,
        modularity: q,
        assignment: p,
        dendrogram: d,
    };
    artifact::write_json(&a.output, &Provenance::new("cluster", seed, a), &file)?;
    Ok(Outcome::summary(format!(
        "cluster: {} {} nodes -> {} clusters, Q={:.6} -> {}",
        file.node_ids.len(),
        kind_name(file.kind),
        file.k,
        q,
        a.output.display()
    )))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub restarts: usize,
    pub max_passes: usize,
    pub best_run: usize,
    pub run_costs: Vec<f64>,
}

/// Output of `cocluster`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoclusterFile {
    #[serde(flatten)]
    pub model: ModelFile,
    pub search: SearchSummary,
}

pub fn cocluster(a: &CoclusterArgs, seed: u64, jobs: usize) -> Result<Outcome, CliError> {
    artifact::require_inputs([a.input.as_path()])?;
    let problem = Problem::new(artifact::load_matrix(&a.input)?);
    let cfg = VnsConfig { restarts: a.restarts, seed, max_passes: a.max_passes, jobs };
    let out = vns_search(&problem, &cfg)?;
    out.model.audit()?;
    let file = CoclusterFile {
        model: out.model.to_file(),
        search: SearchSummary {
            restarts: a.restarts,
            max_passes: a.max_passes,
            best_run: out.best_run,
            run_costs: out.run_costs,
        },
    };
    artifact::write_json(&a.output, &Provenance::new("cocluster", seed, a), &file)?;
    let m = problem.matrix();
    Ok(Outcome::summary(format!(
        "cocluster: {} trajectories x {} segments -> {} x {} co-clusters, cost {:.6} nats (best of {} runs: {}) -> {}",
        m.n_rows(),
        m.n_cols(),
        file.model.k_trajectories,
        file.model.k_segments,
        file.model.cost,
        file.search.run_costs.len(),
        file.search.best_run,
        a.output.display()
    )))
}

/// Output of `evaluate`.
#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub source: &'static str,
    pub trajectories: usize,
    pub clusters: usize,
    pub classes: usize,
    pub ari: f64,
    pub purity_threshold: f64,
    pub pure_clusters: usize,
    pub all_pure: bool,
    pub weighted_purity: f64,
    pub confusion: ContingencyReport,
}

/// Trajectory ids and cluster labels of a prediction artifact.
fn load_prediction(path: &Path, cut_k: Option<usize>) -> Result<(&'static str, Vec<TrajectoryId>, Partition), CliError> {
    let value = artifact::read_value(path)?;
    let has = |key: &str| value.get(key).is_some();
    if has("trajectory_clusters") {
        if cut_k.is_some() {
            return Err(CliError::Usage("--cut applies to modularity results only".into()));
        }
        let file: ModelFile = artifact::read_json(path)?;
        return Ok(("cocluster", file.trajectory_ids, file.trajectory_clusters));
    }
    if has("dendrogram") {
        let file: ClusterFile = artifact::read_json(path)?;
        if file.kind != NodeKind::Trajectory {
            return Err(CliError::Data(format!("{}: segment clusters cannot be compared with trajectory classes", path.display())));
        }
        let p = match cut_k {
            Some(k) => cut(&file.dendrogram, CutTarget::Clusters(k))?,
            None => file.assignment,
        };
        return Ok(("modularity", file.node_ids, p));
    }
    Err(CliError::Data(format!("{}: neither a co-clustering model nor a clustering result", path.display())))
}

pub fn evaluate(a: &EvaluateArgs, seed: u64) -> Result<Outcome, CliError> {
    artifact::require_inputs([a.pred.as_path(), a.truth.as_path()])?;
    if !(a.purity > 0.0 && a.purity <= 1.0) {
        return Err(CliError::Usage(format!("--purity must be in (0, 1], got {}", a.purity)));
    }
    let (source, ids, pred) = load_prediction(&a.pred, a.cut)?;
    let truth = artifact::load_dataset(&a.truth)?;
    let labels: HashMap<TrajectoryId, &str> = truth
        .trajectories
        .iter()
        .map(|t| {
            t.label
                .as_deref()
                .map(|l| (t.id, l))
                .ok_or_else(|| CliError::Data(format!("{}: trajectory {} has no class label", a.truth.display(), t.id)))
        })
        .collect::<Result<_, _>>()?;
    if labels.len() != ids.len() {
        return Err(Error::ElementMismatch(format!("{} predicted trajectories, {} labeled", ids.len(), labels.len())).into());
    }
    let truth_labels: Vec<String> = ids
        .iter()
        .map(|id| {
            labels
                .get(id)
                .map(|l| l.to_string())
                .ok_or_else(|| Error::ElementMismatch(format!("trajectory {id} has no ground-truth label")))
        })
        .collect::<Result<_, _>>()?;
    let report = confusion(&pred, &truth_labels)?;
    let ari = adjusted_rand_index(&pred, &Partition::from_labels(&truth_labels))?;
    let eval = Evaluation {
        source,
        trajectories: ids.len(),
        clusters: pred.k(),
        classes: report.col_labels.len(),
        ari,
        purity_threshold: a.purity,
        pure_clusters: report.pure_rows(a.purity),
        all_pure: report.all_pure(a.purity),
        weighted_purity: report.weighted_purity(),
        confusion: report,
    };
    let summary = format!(
        "evaluate: ARI={:.4}, {} clusters vs {} classes, {}/{} clusters >= {:.0}% pure",
        eval.ari,
        eval.clusters,
        eval.classes,
        eval.pure_clusters,
        eval.clusters,
        a.purity * 100.0
    );
    emit(a.output.as_deref(), &Provenance::new("evaluate", seed, a), &eval, summary)
}

/// Output of `report`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub k_trajectories: usize,
    pub k_segments: usize,
    pub cost: f64,
    pub cost_breakdown: CostBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutual_information: Option<MiReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossed: Option<CrossedMatrix>,
}

pub fn report(a: &ReportArgs, seed: u64) -> Result<Outcome, CliError> {
    artifact::require_inputs([a.model.as_path(), a.input.as_path()])?;
    if a.pgm.is_some() && !a.sections.contains(&Section::Crossed) {
        return Err(CliError::Usage("--pgm needs the crossed section".into()));
    }
    let file: ModelFile = artifact::read_json(&a.model)?;
    let problem = Problem::new(artifact::load_matrix(&a.input)?);
    let model = file.to_model(problem)?;
    let unit = match a.unit {
        Unit::Nats => InfoUnit::Nats,
        Unit::Bits => InfoUnit::Bits,
    };
    let mi = match a.sections.contains(&Section::Mi) {
        true => Some(mutual_information(&model, unit)?),
        false => None,
    };
    let crossed = match a.sections.contains(&Section::Crossed) {
        true => Some(crossed_matrix(model.matrix(), &model.trajectory_partition(), &model.segment_partition())?),
        false => None,
    };
    if let (Some(path), Some(x)) = (&a.pgm, &crossed) {
        artifact::write(path, x.to_pgm())?;
    }
    let mut summary = format!("report: {} x {} co-clusters, cost {:.6} nats", file.k_trajectories, file.k_segments, model.cost());
    if let Some(r) = &mi {
        let unit = if a.unit == Unit::Bits { "bits" } else { "nats" };
        summary.push_str(&format!(", MI {:.6} {unit}", r.total));
    }
    if let Some(b) = crossed.as_ref().and_then(|x| x.blocks.iter().max_by(|p, q| p.density.total_cmp(&q.density))) {
        summary.push_str(&format!(", densest block ({}, {}) {:.3}", b.trajectory_cluster, b.segment_cluster, b.density));
    }
    let body = Report {
        k_trajectories: model.k(trajcc_core::cocluster::Side::Trajectory),
        k_segments: model.k(trajcc_core::cocluster::Side::Segment),
        cost: model.cost(),
        cost_breakdown: model.breakdown(),
        mutual_information: mi,
        crossed,
    };
    emit(a.output.as_deref(), &Provenance::new("report", seed, a), &body, summary)
}
