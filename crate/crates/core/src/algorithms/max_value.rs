use crate::engine::program::{Combiner, Context, ProgramError, VertexProgram};
use crate::graph::{Graph, VertexId};

/// Spreads the largest vertex value to everything reachable from it.
///
/// Superstep 0 broadcasts the loaded value. Afterwards a vertex that learns
/// of a larger value adopts and rebroadcasts it; otherwise it votes to halt.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxValue;

pub fn max_value_program() -> MaxValue {
    MaxValue
}

impl VertexProgram for MaxValue {
    fn init(&self, _vertex: VertexId, _num_vertices: usize, loaded: Option<f64>) -> f64 {
        loaded.unwrap_or(f64::NEG_INFINITY)
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        if ctx.superstep() == 0 {
            ctx.send_to_all_neighbors(ctx.value());
            return Ok(());
        }
        let current = ctx.value();
        let best = messages.iter().copied().fold(current, f64::max);
        if best > current {
            ctx.set_value(best);
            ctx.send_to_all_neighbors(best);
        } else {
            ctx.vote_to_halt();
        }
        Ok(())
    }

    fn combiner(&self) -> Option<Combiner> {
        Some(Combiner::max())
    }

    fn validate(&self, graph: &Graph) -> Result<(), ProgramError> {
        for v in graph.vertices() {
            match graph.initial_value(v) {
                Some(x) if !x.is_nan() => {}
                _ => {
                    return Err(ProgramError::InvalidInput(format!(
                        "vertex {} has no numeric initial value",
                        graph.label(v).unwrap_or("?")
                    )))
                }
            }
        }
        Ok(())
    }
}
