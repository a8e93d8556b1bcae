use crate::engine::program::{Combiner, Context, ProgramError, VertexProgram};
use crate::graph::VertexId;

/// Weakly connected components by minimum-label propagation. Expects a
/// symmetrized graph; each vertex ends labelled with the smallest id in its
/// component.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConnectedComponents;

pub fn wcc_program() -> ConnectedComponents {
    ConnectedComponents
}

impl VertexProgram for ConnectedComponents {
    fn init(&self, vertex: VertexId, _num_vertices: usize, _loaded: Option<f64>) -> f64 {
        f64::from(vertex.0)
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        if ctx.superstep() == 0 {
            ctx.send_to_all_neighbors(ctx.value());
        } else {
            let smallest = messages.iter().copied().fold(ctx.value(), f64::min);
            if smallest < ctx.value() {
                ctx.set_value(smallest);
                ctx.send_to_all_neighbors(smallest);
            }
        }
        ctx.vote_to_halt();
        Ok(())
    }

    fn combiner(&self) -> Option<Combiner> {
        Some(Combiner::min())
    }
}
