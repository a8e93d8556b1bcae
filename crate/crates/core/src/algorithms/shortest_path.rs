use crate::engine::program::{Combiner, Context, ProgramError, VertexProgram};
use crate::graph::{Graph, VertexId};

/// Single-source shortest paths by message relaxation.
///
/// The source starts at 0, every other vertex at `+inf`. A vertex that
/// receives a shorter distance adopts it and offers `dist + weight` to its
/// out-neighbours. With `unit_weights` every edge counts as 1 (BFS levels).
#[derive(Debug, Clone, Copy)]
pub struct ShortestPaths {
    source: VertexId,
    unit_weights: bool,
}

pub fn sssp_program(source: VertexId) -> ShortestPaths {
    ShortestPaths {
        source,
        unit_weights: false,
    }
}

pub fn bfs_program(source: VertexId) -> ShortestPaths {
    ShortestPaths {
        source,
        unit_weights: true,
    }
}

impl ShortestPaths {
    fn relax(&self, ctx: &mut Context<'_>) {
        let dist = ctx.value();
        for edge in ctx.out_edges() {
            let w = if self.unit_weights { 1.0 } else { edge.weight };
            ctx.send_message(edge.dst, dist + w);
        }
    }
}

impl VertexProgram for ShortestPaths {
    fn init(&self, vertex: VertexId, _num_vertices: usize, _loaded: Option<f64>) -> f64 {
        if vertex == self.source {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        if ctx.superstep() == 0 {
            if ctx.vertex() == self.source {
                self.relax(ctx);
            }
        } else {
            let best = messages.iter().copied().fold(f64::INFINITY, f64::min);
            if best < ctx.value() {
                ctx.set_value(best);
                self.relax(ctx);
            }
        }
        ctx.vote_to_halt();
        Ok(())
    }

    fn combiner(&self) -> Option<Combiner> {
        Some(Combiner::min())
    }

    fn validate(&self, graph: &Graph) -> Result<(), ProgramError> {
        if !graph.is_live(self.source) {
            return Err(ProgramError::InvalidInput(format!(
                "source vertex {} does not exist",
                self.source
            )));
        }
        if !self.unit_weights {
            if let Some(e) = graph.edges().find(|e| e.weight.is_nan() || e.weight < 0.0) {
                return Err(ProgramError::InvalidInput(format!(
                    "edge {} -> {} has negative weight {}",
                    e.src, e.dst, e.weight
                )));
            }
        }
        Ok(())
    }
}
