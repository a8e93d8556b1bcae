use crate::engine::program::{Combiner, Context, ProgramError, VertexProgram};
use crate::engine::{run_program, EngineConfig, EngineError};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    /// Probability of jumping to a uniformly random page.
    pub teleport: f64,
    /// Superstep at which vertices stop sending and vote to halt.
    pub max_supersteps: u64,
    /// Initial value of every vertex; `None` means `1/N`.
    pub init_value: Option<f64>,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            teleport: 0.15,
            max_supersteps: 30,
            init_value: None,
        }
    }
}

impl PageRankConfig {
    pub fn damping(&self) -> f64 {
        1.0 - self.teleport
    }
}

/// Damped PageRank with a fixed number of rounds.
///
/// From superstep 1 on, each vertex sets its value to
/// `teleport / N + damping * (sum of incoming)`; until the round limit it
/// sends `value / out_degree` along every out-edge, and at the limit it
/// votes to halt. Dangling vertices send nothing, so their mass is lost.
#[derive(Debug, Clone)]
pub struct PageRank {
    teleport: f64,
    damping: f64,
    max_supersteps: u64,
    init_value: Option<f64>,
}

pub fn pagerank_program(cfg: PageRankConfig) -> Result<PageRank, ProgramError> {
    if !(cfg.teleport > 0.0 && cfg.teleport < 1.0) {
        return Err(ProgramError::InvalidInput(format!(
            "teleport must lie in (0, 1), got {}",
            cfg.teleport
        )));
    }
    Ok(PageRank {
        teleport: cfg.teleport,
        damping: cfg.damping(),
        max_supersteps: cfg.max_supersteps,
        init_value: cfg.init_value,
    })
}

impl VertexProgram for PageRank {
    fn init(&self, _vertex: VertexId, num_vertices: usize, _loaded: Option<f64>) -> f64 {
        self.init_value.unwrap_or(1.0 / num_vertices as f64)
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        if ctx.superstep() >= 1 {
            let sum = messages.iter().fold(0.0, |acc, m| acc + m);
            let n = ctx.num_vertices() as f64;
            ctx.set_value(self.teleport / n + self.damping * sum);
        }
        if ctx.superstep() < self.max_supersteps {
            let degree = ctx.out_degree();
            if degree > 0 {
                ctx.send_to_all_neighbors(ctx.value() / degree as f64);
            }
        } else {
            ctx.vote_to_halt();
        }
        Ok(())
    }

    fn combiner(&self) -> Option<Combiner> {
        Some(Combiner::sum())
    }

    fn validate(&self, graph: &Graph) -> Result<(), ProgramError> {
        if graph.is_empty() {
            return Err(ProgramError::InvalidInput(
                "PageRank needs at least one vertex".into(),
            ));
        }
        Ok(())
    }
}

/// Runs PageRank twice, differing only in the initial value, and returns the
/// L-infinity distance between the two final vectors.
pub fn pagerank_initial_value_insensitivity_check(
    graph: &Graph,
    inits: (f64, f64),
    cfg: PageRankConfig,
    engine: &EngineConfig,
) -> Result<f64, EngineError> {
    let run = |init: f64| -> Result<Vec<f64>, EngineError> {
        let program = pagerank_program(PageRankConfig {
            init_value: Some(init),
            ..cfg
        })
        .map_err(EngineError::Rejected)?;
        Ok(run_program(&program, graph.clone(), engine.clone())?.value_vec())
    };
    let a = run(inits.0)?;
    let b = run(inits.1)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
