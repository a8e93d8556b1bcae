use thiserror::Error;

use crate::engine::message::Envelope;
use crate::engine::mutation::MutationRequest;
use crate::graph::{Edge, Graph, VertexId};

/// Binary reduce used by combiners and aggregators. Must be commutative and
/// associative; the engine does not check this.
pub type ReduceFn = fn(f64, f64) -> f64;

fn add(a: f64, b: f64) -> f64 {
    a + b
}

/// Message combiner: folds all payloads bound for one vertex into one.
#[derive(Clone, Copy)]
pub struct Combiner {
    name: &'static str,
    reduce: ReduceFn,
}

impl Combiner {
    pub fn new(name: &'static str, reduce: ReduceFn) -> Self {
        Combiner { name, reduce }
    }

    pub fn sum() -> Self {
        Combiner::new("sum", add)
    }

    pub fn min() -> Self {
        Combiner::new("min", f64::min)
    }

    pub fn max() -> Self {
        Combiner::new("max", f64::max)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    #[inline]
    pub fn reduce(&self, a: f64, b: f64) -> f64 {
        (self.reduce)(a, b)
    }
}

impl std::fmt::Debug for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("Combiner").field(&self.name).finish()
    }
}

/// A named global reduce. Values contributed during superstep `s` are
/// visible to every vertex during `s + 1`.
#[derive(Clone)]
pub struct AggregatorSpec {
    pub name: String,
    pub identity: f64,
    pub reduce: ReduceFn,
}

impl AggregatorSpec {
    pub fn new(name: impl Into<String>, identity: f64, reduce: ReduceFn) -> Self {
        AggregatorSpec {
            name: name.into(),
            identity,
            reduce,
        }
    }

    pub fn sum(name: impl Into<String>) -> Self {
        AggregatorSpec::new(name, 0.0, add)
    }

    pub fn min(name: impl Into<String>) -> Self {
        AggregatorSpec::new(name, f64::INFINITY, f64::min)
    }

    pub fn max(name: impl Into<String>) -> Self {
        AggregatorSpec::new(name, f64::NEG_INFINITY, f64::max)
    }
}

impl std::fmt::Debug for AggregatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AggregatorSpec")
            .field("name", &self.name)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProgramError {
    #[error("unknown aggregator `{0}`")]
    UnknownAggregator(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0}")]
    Failed(String),
}

/// User hooks executed by the engine.
///
/// `compute` sees only its own vertex, its out-edges, the superstep index,
/// the live vertex count, its incoming messages and the aggregates reduced
/// at the previous barrier.
pub trait VertexProgram: Sync {
    /// Initial value for `vertex`. `loaded` is the value supplied with the
    /// graph (or with an add-vertex mutation), if any.
    fn init(&self, vertex: VertexId, num_vertices: usize, loaded: Option<f64>) -> f64;

    /// Runs one vertex for one superstep. With a combiner installed,
    /// `messages` holds at most one payload.
    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError>;

    fn combiner(&self) -> Option<Combiner> {
        None
    }

    fn aggregators(&self) -> Vec<AggregatorSpec> {
        Vec::new()
    }

    /// Rejects graphs the program cannot run on.
    fn validate(&self, _graph: &Graph) -> Result<(), ProgramError> {
        Ok(())
    }
}

impl<P: VertexProgram + ?Sized> VertexProgram for Box<P> {
    fn init(&self, vertex: VertexId, num_vertices: usize, loaded: Option<f64>) -> f64 {
        (**self).init(vertex, num_vertices, loaded)
    }

    fn compute(&self, ctx: &mut Context<'_>, messages: &[f64]) -> Result<(), ProgramError> {
        (**self).compute(ctx, messages)
    }

    fn combiner(&self) -> Option<Combiner> {
        (**self).combiner()
    }

    fn aggregators(&self) -> Vec<AggregatorSpec> {
        (**self).aggregators()
    }

    fn validate(&self, graph: &Graph) -> Result<(), ProgramError> {
        (**self).validate(graph)
    }
}

/// Aggregator contribution tagged with its originating vertex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Contribution {
    pub vertex: VertexId,
    pub aggregator: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct IssuedMutation {
    pub issuer: VertexId,
    pub seq: u32,
    pub request: MutationRequest,
}

/// Per-worker output buffers filled by [`Context`] during a superstep.
#[derive(Debug)]
pub(crate) struct Scratch {
    pub buckets: Vec<Vec<Envelope>>,
    pub contributions: Vec<Contribution>,
    pub mutations: Vec<IssuedMutation>,
    pub sent: usize,
}

impl Scratch {
    pub fn new(workers: usize) -> Self {
        Scratch {
            buckets: vec![Vec::new(); workers],
            contributions: Vec::new(),
            mutations: Vec::new(),
            sent: 0,
        }
    }
}

/// Read-only view of the aggregate table during a superstep.
pub(crate) struct AggregateView<'a> {
    pub specs: &'a [AggregatorSpec],
    pub values: &'a [f64],
}

impl AggregateView<'_> {
    fn position(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }
}

/// Everything a vertex may touch while computing.
pub struct Context<'a> {
    vertex: VertexId,
    superstep: u64,
    num_vertices: usize,
    value: f64,
    halt: bool,
    edges: &'a [Edge],
    aggregates: &'a AggregateView<'a>,
    scratch: &'a mut Scratch,
    seq: u32,
}

impl<'a> Context<'a> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        vertex: VertexId,
        superstep: u64,
        num_vertices: usize,
        value: f64,
        edges: &'a [Edge],
        aggregates: &'a AggregateView<'a>,
        scratch: &'a mut Scratch,
    ) -> Self {
        Context {
            vertex,
            superstep,
            num_vertices,
            value,
            halt: false,
            edges,
            aggregates,
            scratch,
            seq: 0,
        }
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn superstep(&self) -> u64 {
        self.superstep
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn set_value(&mut self, value: f64) {
        self.value = value;
    }

    pub fn out_edges(&self) -> &'a [Edge] {
        self.edges
    }

    pub fn out_degree(&self) -> usize {
        self.edges.len()
    }

    /// Queues `payload` for delivery to `target` at the next superstep.
    pub fn send_message(&mut self, target: VertexId, payload: f64) {
        let workers = self.scratch.buckets.len();
        self.scratch.buckets[target.index() % workers].push(Envelope {
            target,
            sender: self.vertex,
            payload,
        });
        self.scratch.sent += 1;
    }

    /// One message per out-edge, so parallel edges deliver duplicates.
    pub fn send_to_all_neighbors(&mut self, payload: f64) {
        for edge in self.edges {
            self.send_message(edge.dst, payload);
        }
    }

    pub fn vote_to_halt(&mut self) {
        self.halt = true;
    }

    pub(crate) fn halted(&self) -> bool {
        self.halt
    }

    pub fn aggregate(&mut self, name: &str, value: f64) -> Result<(), ProgramError> {
        let aggregator = self
            .aggregates
            .position(name)
            .ok_or_else(|| ProgramError::UnknownAggregator(name.to_owned()))?;
        self.scratch.contributions.push(Contribution {
            vertex: self.vertex,
            aggregator,
            value,
        });
        Ok(())
    }

    /// Aggregate reduced at the previous barrier (identity at superstep 0).
    pub fn aggregated(&self, name: &str) -> Option<f64> {
        self.aggregates
            .position(name)
            .map(|i| self.aggregates.values[i])
    }

    pub fn add_vertex(&mut self, id: VertexId, value: f64) {
        self.mutate(MutationRequest::AddVertex { id, value });
    }

    pub fn remove_vertex(&mut self, id: VertexId) {
        self.mutate(MutationRequest::RemoveVertex { id });
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, weight: f64) {
        self.mutate(MutationRequest::AddEdge { src, dst, weight });
    }

    pub fn remove_edge(&mut self, src: VertexId, dst: VertexId) {
        self.mutate(MutationRequest::RemoveEdge { src, dst });
    }

    fn mutate(&mut self, request: MutationRequest) {
        self.scratch.mutations.push(IssuedMutation {
            issuer: self.vertex,
            seq: self.seq,
            request,
        });
        self.seq += 1;
    }
}
