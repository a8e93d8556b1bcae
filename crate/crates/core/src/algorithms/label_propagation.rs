use crate::engine::program::{AggregatorSpec, Context, ProgramError, VertexProgram};
use crate::graph::VertexId;

/// Aggregator counting label changes per superstep.
pub const CHANGES_AGGREGATOR: &str = "labelprop_changes";

/// Synchronous label propagation.
///
/// Labels start as vertex ids. Every superstep each vertex sends its label
/// to its out-neighbours and adopts the most frequent label it received,
/// ties going to the lowest label. Once a whole superstep passes without a
/// change anywhere, every vertex votes to halt; `max_rounds` is a hard stop.
#[derive(Debug, Clone, Copy)]
pub struct LabelPropagation {
    max_rounds: u64,
}

pub fn label_propagation_program(max_rounds: u64) -> LabelPropagation {
    LabelPropagation { max_rounds }
}

/// Most frequent value, lowest on ties. `None` if empty.
fn dominant_label(messages: &[f64]) -> Option<f64> {
    let mut sorted = messages.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut best: Option<(f64, usize)> = None;
    for run in sorted.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, count)| run.len() > count) {
            best = Some((run[0], run.len()));
        }
    }
    best.map(|(label, _)| label)
}

impl VertexProgram for LabelPropagation {
    fn init(&self, vertex: VertexId, _num_vertices: usize, _loaded: Option<f64>) -> f64 {
        f64::from(vertex.0)
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        let s = ctx.superstep();
        if s >= 2 && ctx.aggregated(CHANGES_AGGREGATOR) == Some(0.0) {
            ctx.vote_to_halt();
            return Ok(());
        }
        if let Some(label) = dominant_label(messages) {
            if label != ctx.value() {
                ctx.set_value(label);
                ctx.aggregate(CHANGES_AGGREGATOR, 1.0)?;
            }
        }
        if s >= self.max_rounds {
            ctx.vote_to_halt();
        } else {
            ctx.send_to_all_neighbors(ctx.value());
        }
        Ok(())
    }

    fn aggregators(&self) -> Vec<AggregatorSpec> {
        vec![AggregatorSpec::sum(CHANGES_AGGREGATOR)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_program, EngineConfig, TerminationReason};
    use crate::graph::{build_graph, GraphBuilder};

    #[test]
    fn dominant_label_rules() {
        assert_eq!(dominant_label(&[]), None);
        assert_eq!(dominant_label(&[4.0, 2.0]), Some(2.0));
        assert_eq!(dominant_label(&[4.0, 2.0, 4.0]), Some(4.0));
        assert_eq!(dominant_label(&[3.0, 1.0, 3.0, 1.0, 0.0]), Some(1.0));
    }

    #[test]
    fn triangle_converges_to_zero() {
        let g = build_graph(
            [("0", "1", None), ("1", "2", None), ("2", "0", None)],
            false,
        )
        .unwrap();
        let result =
            run_program(&label_propagation_program(30), g, EngineConfig::default()).unwrap();
        assert_eq!(result.value_vec(), vec![0.0; 3]);
        assert_eq!(result.termination, TerminationReason::Quiescent);
    }

    #[test]
    fn isolated_vertex_keeps_label() {
        let mut b = GraphBuilder::new(false);
        b.vertex("a");
        b.edge("b", "c", None).unwrap();
        let result = run_program(
            &label_propagation_program(10),
            b.build(),
            EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.value(VertexId(0)), Some(0.0));
    }
}
