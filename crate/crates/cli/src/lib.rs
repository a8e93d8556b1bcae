//! Command-line runner: load an edge list, run a built-in program, write the
//! vertex values, optionally check them against a sequential oracle.
//!
//! Exit codes: 0 success, 1 usage error, 2 load error, 3 run error,
//! 4 verification mismatch.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgAction, CommandFactory, Parser};
use thiserror::Error;

use pregel::algorithms::{
    bfs_program, label_propagation_program, max_value_program, pagerank_program, sssp_program,
    wcc_program, Algorithm, PageRankConfig,
};
use pregel::io::{load_graph, parse_edge_list, write_metrics, write_vertex_values};
use pregel::oracles;
use pregel::{
    run_program, EngineConfig, EngineError, FailurePlan, Graph, RunResult, VertexId, VertexProgram,
};

/// Largest per-vertex PageRank deviation from the oracle that still passes.
pub const PAGERANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "pregel",
    version,
    about = "Run a vertex program over an edge-list graph"
)]
struct Args {
    /// pagerank, maxvalue, sssp, bfs, wcc or labelprop
    #[arg(long)]
    algorithm: Algorithm,
    /// Edge-list file
    #[arg(long)]
    graph: PathBuf,
    /// Where to write `label<TAB>value` lines (stdout if omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = 30)]
    max_supersteps: u64,
    #[arg(long, default_value_t = 0.15)]
    teleport: f64,
    /// Source vertex label (sssp and bfs only)
    #[arg(long)]
    source: Option<String>,
    /// Stop once the L1 change of a superstep drops below this
    #[arg(long)]
    convergence: Option<f64>,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    deterministic: bool,
    /// Supersteps between checkpoints; 0 disables them
    #[arg(long, default_value_t = 0)]
    checkpoint_interval: u64,
    /// Inject a worker failure, as WORKER@SUPERSTEP
    #[arg(long)]
    fail_worker: Option<FailurePlan>,
    /// Compare the result against a sequential oracle
    #[arg(long)]
    verify: bool,
    /// Where to write per-superstep metrics as JSON lines
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Add the reverse of every edge (always on for wcc)
    #[arg(long)]
    undirected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub algorithm: Algorithm,
    pub graph: PathBuf,
    pub output: Option<PathBuf>,
    pub source: Option<String>,
    pub teleport: f64,
    pub engine: EngineConfig,
    pub verify: bool,
    pub metrics: Option<PathBuf>,
    pub undirected: bool,
}

/// Parses and validates arguments; `argv[0]` is the program name.
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let usage = |msg: String| Args::command().error(ErrorKind::ArgumentConflict, msg);

    match (args.algorithm.needs_source(), &args.source) {
        (true, None) => {
            return Err(Args::command().error(
                ErrorKind::MissingRequiredArgument,
                format!("--source is required for {}", args.algorithm),
            ))
        }
        (false, Some(_)) => {
            return Err(usage(format!(
                "--source does not apply to {}",
                args.algorithm
            )))
        }
        _ => {}
    }
    if args.fail_worker.is_some() && args.checkpoint_interval == 0 {
        return Err(usage(
            "--fail-worker requires --checkpoint-interval > 0".into(),
        ));
    }
    if !(args.teleport > 0.0 && args.teleport < 1.0) {
        return Err(usage(format!(
            "--teleport must lie in (0, 1), got {}",
            args.teleport
        )));
    }
    let engine = EngineConfig {
        workers: args.workers,
        max_supersteps: args.max_supersteps,
        deterministic: args.deterministic,
        checkpoint_interval: args.checkpoint_interval,
        failure_plan: args.fail_worker,
        convergence: args.convergence,
    };
    engine.validate().map_err(|e| usage(e.to_string()))?;

    Ok(CliConfig {
        algorithm: args.algorithm,
        graph: args.graph,
        output: args.output,
        source: args.source,
        teleport: args.teleport,
        engine,
        verify: args.verify,
        metrics: args.metrics,
        undirected: args.undirected || args.algorithm == Algorithm::Wcc,
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot load graph: {0}")]
    Load(String),
    #[error("run failed: {0}")]
    Run(#[from] EngineError),
    #[error("cannot write {what}: {source}")]
    Write {
        what: &'static str,
        #[source]
        source: io::Error,
    },
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(_) => 2,
            CliError::Run(_) | CliError::Write { .. } => 3,
            CliError::Verify(_) => 4,
        }
    }
}

pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(&config) {
        Ok(verdict) => {
            eprintln!("{verdict}");
            0
        }
        Err(e) => {
            eprintln!("pregel: {e}");
            e.exit_code()
        }
    }
}

fn load(config: &CliConfig) -> Result<Graph, CliError> {
    let text = fs::read_to_string(&config.graph)
        .map_err(|e| CliError::Load(format!("{}: {e}", config.graph.display())))?;
    let doc = parse_edge_list(&text).map_err(|e| CliError::Load(e.to_string()))?;
    load_graph(&doc, !config.undirected).map_err(|e| CliError::Load(e.to_string()))
}

fn source_vertex(config: &CliConfig, graph: &Graph) -> Result<VertexId, CliError> {
    let label = config.source.as_deref().unwrap_or_default();
    graph
        .vertex_by_label(label)
        .ok_or_else(|| CliError::Load(format!("source vertex `{label}` is not in the graph")))
}

fn program_for(config: &CliConfig, graph: &Graph) -> Result<Box<dyn VertexProgram>, CliError> {
    Ok(match config.algorithm {
        Algorithm::PageRank => Box::new(
            pagerank_program(PageRankConfig {
                teleport: config.teleport,
                max_supersteps: config.engine.max_supersteps,
                init_value: None,
            })
            .map_err(EngineError::Rejected)?,
        ),
        Algorithm::MaxValue => Box::new(max_value_program()),
        Algorithm::Sssp => Box::new(sssp_program(source_vertex(config, graph)?)),
        Algorithm::Bfs => Box::new(bfs_program(source_vertex(config, graph)?)),
        Algorithm::Wcc => Box::new(wcc_program()),
        Algorithm::LabelProp => Box::new(label_propagation_program(config.engine.max_supersteps)),
    })
}

fn run(config: &CliConfig) -> Result<String, CliError> {
    let graph = load(config)?;
    let program = program_for(config, &graph)?;
    let result = run_program(program.as_ref(), graph.clone(), config.engine.clone())?;

    let write_err = |what| move |source| CliError::Write { what, source };
    match &config.output {
        Some(path) => {
            let mut sink = BufWriter::new(File::create(path).map_err(write_err("output"))?);
            write_vertex_values(&result.values, &result.graph, &mut sink)
                .map_err(write_err("output"))?;
            sink.flush().map_err(write_err("output"))?;
        }
        None => {
            let stdout = io::stdout();
            write_vertex_values(&result.values, &result.graph, &mut stdout.lock())
                .map_err(write_err("output"))?;
        }
    }
    if let Some(path) = &config.metrics {
        let mut sink = BufWriter::new(File::create(path).map_err(write_err("metrics"))?);
        write_metrics(&result, &mut sink).map_err(write_err("metrics"))?;
        sink.flush().map_err(write_err("metrics"))?;
    }

    let summary = format!(
        "{}: {} vertices, {} supersteps executed, {:?}, {} recoveries",
        config.algorithm,
        result.values.len(),
        result.supersteps_executed,
        result.termination,
        result.recoveries
    );
    if !config.verify {
        return Ok(summary);
    }
    let check = verify(config, &graph, &result)?;
    Ok(format!("{summary}; verify: {check}"))
}

/// Compares `result` with the matching oracle; `Err` on any excess deviation.
fn verify(config: &CliConfig, graph: &Graph, result: &RunResult) -> Result<String, CliError> {
    let expected: Vec<f64> = match config.algorithm {
        Algorithm::PageRank => {
            let init = 1.0 / graph.num_vertices() as f64;
            let iters = result.last_superstep as usize;
            let reference = oracles::pagerank_power_iteration(graph, config.teleport, iters, init);
            let deviation = result
                .values
                .iter()
                .map(|(v, x)| (x - reference[v.index()]).abs())
                .fold(0.0, f64::max);
            let line = format!("max deviation {deviation:e} (tolerance {PAGERANK_TOLERANCE:e})");
            return if deviation <= PAGERANK_TOLERANCE {
                Ok(line)
            } else {
                Err(CliError::Verify(line))
            };
        }
        Algorithm::Sssp | Algorithm::Bfs => {
            let source = source_vertex(config, graph)?;
            let reference = if config.algorithm == Algorithm::Sssp {
                oracles::dijkstra(graph, source)
            } else {
                oracles::bfs_levels(graph, source)
            };
            reference.map_err(|e| CliError::Verify(e.to_string()))?
        }
        Algorithm::Wcc => oracles::components_union_find(graph)
            .into_iter()
            .map(|c| f64::from(c.0))
            .collect(),
        Algorithm::MaxValue => {
            let loaded: Vec<f64> = graph
                .initial_values()
                .iter()
                .map(|v| v.unwrap_or(f64::NEG_INFINITY))
                .collect();
            oracles::reachable_max(graph, &loaded)
        }
        Algorithm::LabelProp => {
            oracles::label_propagation_simulation(graph, config.engine.max_supersteps)
        }
    };
    let mismatches: Vec<VertexId> = result
        .values
        .iter()
        .filter(|(v, x)| **x != expected[v.index()])
        .map(|(v, _)| *v)
        .collect();
    match mismatches.first() {
        None => Ok(format!("exact match on {} vertices", result.values.len())),
        Some(&first) => Err(CliError::Verify(format!(
            "{} of {} vertices differ; first is `{}`: got {}, expected {}",
            mismatches.len(),
            result.values.len(),
            graph.label(first).unwrap_or_default(),
            result.values[&first],
            expected[first.index()]
        ))),
    }
}
