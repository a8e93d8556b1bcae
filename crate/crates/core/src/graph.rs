//! Directed multigraph with dense vertex ids, plus modular partitioning.
//!
//! External labels are remapped to ids in `[0, N)` in order of first
//! appearance. Parallel edges and self-loops are kept as given, and each
//! vertex's out-edges stay in input order.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense vertex identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        VertexId(index as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge #{position} ({src} -> {dst}): weight {weight} is negative or not a number")]
    InvalidWeight {
        position: usize,
        src: String,
        dst: String,
        weight: f64,
    },
    #[error("vertex {vertex} out of range (graph has {capacity} vertex slots)")]
    OutOfRange { vertex: VertexId, capacity: usize },
    #[error("vertex {0} has been removed")]
    Removed(VertexId),
    #[error("worker count must be at least 1")]
    NoWorkers,
}

/// Directed graph in per-vertex adjacency form.
///
/// Vertex slots are never reused for a different vertex: removing a vertex
/// through a mutation leaves a dead slot behind, so `capacity()` may exceed
/// `num_vertices()` once mutations have been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<Edge>>,
    live: Vec<bool>,
    live_count: usize,
    edge_count: usize,
    labels: Vec<String>,
    label_index: HashMap<String, VertexId>,
    initial_values: Vec<Option<f64>>,
}

/// Summary produced by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub num_vertices: usize,
    pub edge_count: usize,
    pub dangling_count: usize,
    pub self_loops: usize,
    pub max_out_degree: usize,
}

impl Graph {
    /// Number of live vertices.
    pub fn num_vertices(&self) -> usize {
        self.live_count
    }

    /// Number of id slots, live or dead.
    pub fn capacity(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.live_count == 0
    }

    pub fn is_live(&self, v: VertexId) -> bool {
        self.live.get(v.index()).copied().unwrap_or(false)
    }

    /// Out-edges of `v` in insertion order.
    pub fn out_edges(&self, v: VertexId) -> Result<&[Edge], GraphError> {
        if v.index() >= self.capacity() {
            return Err(GraphError::OutOfRange {
                vertex: v,
                capacity: self.capacity(),
            });
        }
        if !self.live[v.index()] {
            return Err(GraphError::Removed(v));
        }
        Ok(&self.adjacency[v.index()])
    }

    /// Unchecked adjacency access for hot loops; dead slots are empty.
    #[inline]
    pub(crate) fn edges_of(&self, v: VertexId) -> &[Edge] {
        &self.adjacency[v.index()]
    }

    pub fn out_degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.out_edges(v).map(<[Edge]>::len)
    }

    /// Live vertex ids in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &live)| live)
            .map(|(i, _)| VertexId::from_index(i))
    }

    /// All edges, grouped by source in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency.iter().flatten()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v.index()).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.label_index.get(label).copied()
    }

    /// Value supplied for `v` at load time, if any.
    pub fn initial_value(&self, v: VertexId) -> Option<f64> {
        self.initial_values.get(v.index()).copied().flatten()
    }

    pub fn initial_values(&self) -> &[Option<f64>] {
        &self.initial_values
    }

    pub fn dangling_count(&self) -> usize {
        self.vertices()
            .filter(|v| self.adjacency[v.index()].is_empty())
            .count()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut dangling_count = 0;
        let mut max_out_degree = 0;
        for v in self.vertices() {
            let degree = self.adjacency[v.index()].len();
            if degree == 0 {
                dangling_count += 1;
            }
            max_out_degree = max_out_degree.max(degree);
        }
        ValidationReport {
            num_vertices: self.live_count,
            edge_count: self.edge_count,
            dangling_count,
            self_loops: self.edges().filter(|e| e.src == e.dst).count(),
            max_out_degree,
        }
    }

    // Mutation primitives, used by the engine at barriers.

    /// Grows the slot table so that `v` is addressable; new slots are dead.
    pub(crate) fn ensure_slot(&mut self, v: VertexId) {
        while self.capacity() <= v.index() {
            let slot = self.capacity();
            self.adjacency.push(Vec::new());
            self.live.push(false);
            self.initial_values.push(None);
            let label = self.fresh_label(slot);
            self.label_index
                .insert(label.clone(), VertexId::from_index(slot));
            self.labels.push(label);
        }
    }

    /// Marks `v` live. Returns false if it already was.
    pub(crate) fn revive(&mut self, v: VertexId, value: Option<f64>) -> bool {
        self.ensure_slot(v);
        if self.live[v.index()] {
            return false;
        }
        self.live[v.index()] = true;
        self.initial_values[v.index()] = value;
        self.live_count += 1;
        true
    }

    /// Kills `v` and drops its out-edges. In-edges are the caller's job.
    pub(crate) fn kill(&mut self, v: VertexId) -> bool {
        if !self.is_live(v) {
            return false;
        }
        self.live[v.index()] = false;
        self.live_count -= 1;
        self.edge_count -= self.adjacency[v.index()].len();
        self.adjacency[v.index()].clear();
        true
    }

    pub(crate) fn push_edge(&mut self, edge: Edge) {
        self.adjacency[edge.src.index()].push(edge);
        self.edge_count += 1;
    }

    /// Removes every `src -> dst` edge; returns how many were removed.
    pub(crate) fn remove_edges(&mut self, src: VertexId, dst: VertexId) -> usize {
        let Some(list) = self.adjacency.get_mut(src.index()) else {
            return 0;
        };
        let before = list.len();
        list.retain(|e| e.dst != dst);
        let removed = before - list.len();
        self.edge_count -= removed;
        removed
    }

    /// Removes all edges whose destination satisfies `dead`.
    pub(crate) fn remove_edges_into(&mut self, dead: impl Fn(VertexId) -> bool) {
        let mut removed = 0;
        for list in &mut self.adjacency {
            let before = list.len();
            list.retain(|e| !dead(e.dst));
            removed += before - list.len();
        }
        self.edge_count -= removed;
    }

    pub(crate) fn from_parts(
        live: Vec<bool>,
        labels: Vec<String>,
        initial_values: Vec<Option<f64>>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let capacity = live.len();
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), VertexId::from_index(i)))
            .collect();
        let mut graph = Graph {
            adjacency: vec![Vec::new(); capacity],
            live_count: live.iter().filter(|&&l| l).count(),
            live,
            edge_count: 0,
            labels,
            label_index,
            initial_values,
        };
        for e in edges {
            graph.push_edge(e);
        }
        graph
    }

    fn fresh_label(&self, slot: usize) -> String {
        let mut label = slot.to_string();
        while self.label_index.contains_key(&label) {
            label.push('\'');
        }
        label
    }
}

/// Incremental constructor that interns labels as they are first seen.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    directed: bool,
    adjacency: Vec<Vec<Edge>>,
    labels: Vec<String>,
    label_index: HashMap<String, VertexId>,
    initial_values: Vec<Option<f64>>,
    edge_count: usize,
    position: usize,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            ..Default::default()
        }
    }

    /// Returns the id for `label`, creating the vertex if needed.
    pub fn vertex(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = VertexId::from_index(self.labels.len());
        self.labels.push(label.to_owned());
        self.label_index.insert(label.to_owned(), id);
        self.adjacency.push(Vec::new());
        self.initial_values.push(None);
        id
    }

    pub fn edge(&mut self, src: &str, dst: &str, weight: Option<f64>) -> Result<(), GraphError> {
        self.position += 1;
        let weight = weight.unwrap_or(1.0);
        if weight.is_nan() || weight < 0.0 {
            return Err(GraphError::InvalidWeight {
                position: self.position,
                src: src.to_owned(),
                dst: dst.to_owned(),
                weight,
            });
        }
        let s = self.vertex(src);
        let d = self.vertex(dst);
        self.adjacency[s.index()].push(Edge {
            src: s,
            dst: d,
            weight,
        });
        self.edge_count += 1;
        if !self.directed {
            self.adjacency[d.index()].push(Edge {
                src: d,
                dst: s,
                weight,
            });
            self.edge_count += 1;
        }
        Ok(())
    }

    pub fn value(&mut self, label: &str, value: f64) {
        let v = self.vertex(label);
        self.initial_values[v.index()] = Some(value);
    }

    pub fn build(self) -> Graph {
        let n = self.labels.len();
        Graph {
            adjacency: self.adjacency,
            live: vec![true; n],
            live_count: n,
            edge_count: self.edge_count,
            labels: self.labels,
            label_index: self.label_index,
            initial_values: self.initial_values,
        }
    }
}

/// Builds a graph from `(src, dst, weight)` triples. With `directed == false`
/// every input edge also yields its reverse.
pub fn build_graph<I, S>(edges: I, directed: bool) -> Result<Graph, GraphError>
where
    I: IntoIterator<Item = (S, S, Option<f64>)>,
    S: AsRef<str>,
{
    let mut builder = GraphBuilder::new(directed);
    for (src, dst, weight) in edges {
        builder.edge(src.as_ref(), dst.as_ref(), weight)?;
    }
    Ok(builder.build())
}

/// Vertex-to-worker assignment: vertex `v` lives on worker `v mod W` at
/// local slot `v div W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionMap {
    workers: usize,
}

impl PartitionMap {
    pub fn new(workers: usize) -> Result<Self, GraphError> {
        if workers == 0 {
            return Err(GraphError::NoWorkers);
        }
        Ok(PartitionMap { workers })
    }

    pub fn num_workers(&self) -> usize {
        self.workers
    }

    #[inline]
    pub fn worker_of(&self, v: VertexId) -> usize {
        v.index() % self.workers
    }

    #[inline]
    pub fn local_slot(&self, v: VertexId) -> usize {
        v.index() / self.workers
    }

    #[inline]
    pub fn vertex_at(&self, worker: usize, slot: usize) -> VertexId {
        VertexId::from_index(slot * self.workers + worker)
    }

    /// Number of ids below `capacity` owned by `worker`.
    pub fn slots(&self, worker: usize, capacity: usize) -> usize {
        if capacity > worker {
            (capacity - worker - 1) / self.workers + 1
        } else {
            0
        }
    }

    /// Ids below `capacity` owned by `worker`, ascending.
    pub fn members(&self, worker: usize, capacity: usize) -> impl Iterator<Item = VertexId> {
        (worker..capacity)
            .step_by(self.workers)
            .map(VertexId::from_index)
    }
}

pub fn assign_partitions(_graph: &Graph, workers: usize) -> Result<PartitionMap, GraphError> {
    PartitionMap::new(workers)
}
