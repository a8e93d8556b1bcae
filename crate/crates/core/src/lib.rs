//! Vertex-centric graph computation in bulk-synchronous supersteps.
//!
//! A [`VertexProgram`] runs over a [`Graph`] split across logical workers.
//! Vertices exchange messages between supersteps, may vote to halt, and the
//! run ends when everything is quiet, a superstep cap is hit, or values
//! stop moving. See [`algorithms`] for the bundled programs and
//! [`oracles`] for the sequential references they are checked against.

pub mod algorithms;
pub mod engine;
pub mod graph;
pub mod io;
pub mod oracles;

pub use engine::mutation::{apply_mutations, MutationEffects, MutationError, MutationRequest};
pub use engine::program::{AggregatorSpec, Combiner, Context, ProgramError, VertexProgram};
pub use engine::{
    check_termination, run_program, BarrierState, Engine, EngineConfig, EngineError, FailurePlan,
    RunResult, StepStatus, SuperstepMetrics, SuperstepOutcome, TerminationReason,
};
pub use graph::{
    assign_partitions, build_graph, Edge, Graph, GraphBuilder, GraphError, PartitionMap,
    ValidationReport, VertexId,
};
