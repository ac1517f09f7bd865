mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inhclust::apps::motif::{HierarchyOptions, MotifCostSpec};
use inhclust::apps::subspace::SubspaceConfig;
use inhclust::io::Format;
use inhclust::spectral::PipelineOptions;
use inhclust::{Execution, ProjectionMethod};

use commands::{CliError, CliResult, Input};

/// Inhomogeneous hypergraph partitioning.
///
/// Results are written as JSON to `--out` or stdout. Exit status is 0 on
/// success, 2 when the requested projection is infeasible and 1 on any other
/// error. `INHCLUST_THREADS` caps the worker thread count.
#[derive(Debug, Parser)]
#[command(name = "inhclust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// hjson, edgelist, rankings or points; each command accepts one.
    #[arg(long)]
    format: Option<Format>,
}

impl InputArgs {
    fn input(&self) -> Input<'_> {
        Input {
            path: &self.input,
            format: self.format,
        }
    }
}

#[derive(Debug, Args)]
struct ProjectionArgs {
    /// auto, singleton, submodular, lp or homogeneous.
    #[arg(long, default_value = "auto")]
    method: ProjectionMethod,
    /// Zero out negative merged weights.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    clip: bool,
}

impl ProjectionArgs {
    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            method: self.method,
            clip: self.clip,
            ..PipelineOptions::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project a hypergraph onto a weighted graph.
    Project {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        projection: ProjectionArgs,
    },
    /// Two-way spectral partition of a hypergraph.
    Partition {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        projection: ProjectionArgs,
    },
    /// k-way spectral partition of a hypergraph.
    Kpartition {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        projection: ProjectionArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Hierarchical fan-motif clustering of a directed graph.
    Motif {
        #[command(flatten)]
        input: InputArgs,
        /// Singleton, same-layer and cross-layer costs.
        #[arg(long, default_value = "1,0,2")]
        costs: String,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 4)]
        min_size: usize,
    },
    /// Split ranked candidates into two riffled-independent sets.
    Ranklearn {
        #[command(flatten)]
        input: InputArgs,
        /// Probability of keeping each candidate triple.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Cluster points lying near k affine subspaces.
    Subspace {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        /// Weight scale; defaults to the median deviation.
        #[arg(long)]
        theta: Option<f64>,
        /// Subspace dimension.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Sampled tuples; defaults to 100·k².
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Numerical audits of the projection guarantees.
    Audit {
        #[command(subcommand)]
        audit: Audit,
    },
}

#[derive(Debug, Subcommand)]
enum Audit {
    /// Sandwich ratios of random submodular costs against the table constants.
    Table1 {
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Latent-graph costs project back to a scaled latent graph.
    Theorem4 {
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Spectral cut against the exhaustive optimum on a small hypergraph.
    Theorem1 {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "auto")]
        method: ProjectionMethod,
    },
    /// Minimax lower bound on β over the built-in extremal families.
    BetaLowerBound {
        #[arg(long)]
        arity: usize,
    },
}

fn parse_costs(s: &str) -> CliResult<MotifCostSpec> {
    let v = s
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("--costs: {e}")))?;
    match v[..] {
        [singleton, same_layer, cross_layer] => Ok(MotifCostSpec {
            singleton,
            same_layer,
            cross_layer,
        }),
        _ => Err(CliError::Usage("--costs expects three comma-separated numbers".into())),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("INHCLUST_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("INHCLUST_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<String> {
    configure_threads()?;
    let exec = Execution::default();
    match &cli.command {
        Command::Project { input, projection } => {
            commands::project(&input.input(), projection.method, projection.clip, exec)
        }
        Command::Partition { input, projection } => commands::partition(&input.input(), &projection.options()),
        Command::Kpartition {
            input,
            projection,
            k,
            seed,
        } => commands::kpartition(&input.input(), *k, *seed, &projection.options()),
        Command::Motif {
            input,
            costs,
            max_depth,
            min_size,
        } => {
            let options = HierarchyOptions {
                spec: parse_costs(costs)?,
                max_depth: *max_depth,
                min_cluster_size: *min_size,
                ..HierarchyOptions::default()
            };
            commands::motif(&input.input(), &options)
        }
        Command::Ranklearn { input, rate, seed } => commands::ranklearn(&input.input(), *rate, *seed, exec),
        Command::Subspace {
            input,
            k,
            seed,
            theta,
            dim,
            samples,
        } => {
            let mut cfg = SubspaceConfig::new(*dim, samples.unwrap_or(100 * k * k), *seed);
            cfg.theta = *theta;
            commands::subspace(&input.input(), *k, &cfg, exec)
        }
        Command::Audit { audit } => match audit {
            Audit::Table1 { arity, trials, seed } => commands::audit_table1(*arity, *trials, *seed, exec),
            Audit::Theorem4 { arity, trials, seed } => commands::audit_theorem4(*arity, *trials, *seed, exec),
            Audit::Theorem1 { input, method } => commands::audit_theorem1(&input.input(), *method),
            Audit::BetaLowerBound { arity } => commands::audit_beta_lower_bound(*arity),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|json| match &cli.out {
        Some(path) => std::fs::write(path, json).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{json}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
