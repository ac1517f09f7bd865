use std::fs;
use std::path::{Path, PathBuf};

use inhclust::apps::motif::{
    build_motif_hypergraph, hierarchical_partition, ClusterNode, HierarchyOptions, MotifCostSpec,
};
use inhclust::apps::rank::{learn_riffled_partition, RiffleSplitJson};
use inhclust::apps::subspace::{segment, SegmentationJson, SubspaceConfig};
use inhclust::io::{parse_edgelist, parse_hypergraph, parse_points, parse_rankings, Format};
use inhclust::minimax::{beta_lower_bound, extremal_families};
use inhclust::oracle::{table1_audit, theorem1_audit, theorem4_audit, Table1Report, Theorem1Report, Theorem4Report};
use inhclust::project::{merge, project_all, projection_report, table1_beta, ProjectionReportEntry};
use inhclust::spectral::{kway_partition, partition2, PartitionJson, PipelineOptions};
use inhclust::{Execution, Hypergraph, ProjectionMethod};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] inhclust::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(inhclust::Error::Infeasible(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Input<'a> {
    pub path: &'a Path,
    pub format: Option<Format>,
}

impl Input<'_> {
    fn read(&self, expected: Format) -> CliResult<String> {
        if let Some(f) = self.format.filter(|&f| f != expected) {
            return Err(CliError::Usage(format!(
                "format {} is not accepted here, expected {}",
                format_name(f),
                format_name(expected)
            )));
        }
        fs::read_to_string(self.path).map_err(|source| CliError::Io {
            path: self.path.to_path_buf(),
            source,
        })
    }

    fn hypergraph(&self) -> CliResult<Hypergraph> {
        Ok(parse_hypergraph(&self.read(Format::Hjson)?).map_err(|e| located(self.path, e))?)
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Hjson => "hjson",
        Format::Edgelist => "edgelist",
        Format::Rankings => "rankings",
        Format::Points => "points",
    }
}

fn located(path: &Path, e: inhclust::Error) -> inhclust::Error {
    match e {
        inhclust::Error::Parse { line, message } => inhclust::Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Serialize)]
pub struct ProjectOutput {
    pub n: usize,
    pub method: ProjectionMethod,
    pub clip: bool,
    pub beta_star: Option<f64>,
    pub clipped: usize,
    pub negative_weights: usize,
    pub edges: Vec<WeightedEdge>,
    pub report: Vec<ProjectionReportEntry>,
}

pub fn project(input: &Input, method: ProjectionMethod, clip: bool, exec: Execution) -> CliResult<String> {
    let h = input.hypergraph()?;
    let projections = project_all(&h, method, exec)?;
    let g = merge(&h, &projections, clip)?;
    let edges: Vec<WeightedEdge> = g.edges().map(|(u, v, w)| WeightedEdge { u, v, w }).collect();
    to_json(&ProjectOutput {
        n: h.n(),
        method,
        clip,
        beta_star: g.beta_star(),
        clipped: g.clipped(),
        negative_weights: edges.iter().filter(|e| e.w < 0.0).count(),
        edges,
        report: projection_report(&projections),
    })
}

pub fn partition(input: &Input, options: &PipelineOptions) -> CliResult<String> {
    let p = partition2(&input.hypergraph()?, options)?;
    to_json(&p.to_json())
}

pub fn kpartition(input: &Input, k: usize, seed: u64, options: &PipelineOptions) -> CliResult<String> {
    let p = kway_partition(&input.hypergraph()?, k, seed, options)?;
    to_json::<PartitionJson>(&p.to_json())
}

#[derive(Debug, Serialize)]
pub struct MotifOutput {
    pub n: usize,
    pub costs: MotifCostSpec,
    pub motifs: usize,
    pub uncovered: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub hierarchy: ClusterNode,
}

pub fn motif(input: &Input, options: &HierarchyOptions) -> CliResult<String> {
    let g = parse_edgelist(&input.read(Format::Edgelist)?).map_err(|e| located(input.path, e))?;
    let mh = build_motif_hypergraph(&g, &options.spec, options.strict, options.exec)?;
    let tree = hierarchical_partition(&g, options)?;
    to_json(&MotifOutput {
        n: g.n(),
        costs: options.spec,
        motifs: mh.motifs.len(),
        uncovered: mh.uncovered,
        clusters: tree.leaves().into_iter().map(|l| l.cluster.clone()).collect(),
        hierarchy: tree,
    })
}

pub fn ranklearn(input: &Input, rate: f64, seed: u64, exec: Execution) -> CliResult<String> {
    let d = parse_rankings(&input.read(Format::Rankings)?).map_err(|e| located(input.path, e))?;
    to_json::<RiffleSplitJson>(&learn_riffled_partition(&d, rate, seed, exec)?.to_json())
}

pub fn subspace(input: &Input, k: usize, cfg: &SubspaceConfig, exec: Execution) -> CliResult<String> {
    let pc = parse_points(&input.read(Format::Points)?).map_err(|e| located(input.path, e))?;
    to_json::<SegmentationJson>(&segment(&pc, cfg, k, exec)?.to_json())
}

pub fn audit_table1(arity: usize, trials: usize, seed: u64, exec: Execution) -> CliResult<String> {
    to_json::<Table1Report>(&table1_audit(arity, trials, seed, exec)?)
}

pub fn audit_theorem4(arity: usize, trials: usize, seed: u64, exec: Execution) -> CliResult<String> {
    to_json::<Theorem4Report>(&theorem4_audit(arity, trials, seed, exec)?)
}

pub fn audit_theorem1(input: &Input, method: ProjectionMethod) -> CliResult<String> {
    to_json::<Theorem1Report>(&theorem1_audit(&input.hypergraph()?, method)?)
}

#[derive(Debug, Serialize)]
pub struct Coefficient {
    pub r: usize,
    pub s: usize,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct BetaLowerBoundOutput {
    pub arity: usize,
    pub families: usize,
    pub beta: f64,
    pub table1_beta: Option<f64>,
    pub coefficients: Vec<Coefficient>,
}

pub fn audit_beta_lower_bound(arity: usize) -> CliResult<String> {
    let families = extremal_families(arity).ok_or_else(|| {
        CliError::Usage(format!(
            "no built-in extremal families for arity {arity}; use 4, 5 or 6"
        ))
    })?;
    let lb = beta_lower_bound(arity, &families)?;
    to_json(&BetaLowerBoundOutput {
        arity,
        families: families.len(),
        beta: lb.beta,
        table1_beta: table1_beta(arity),
        coefficients: lb
            .coefficients
            .into_iter()
            .map(|((r, s), value)| Coefficient { r, s, value })
            .collect(),
    })
}
