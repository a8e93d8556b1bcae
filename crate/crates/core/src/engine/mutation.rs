//! Topology mutations applied at barriers.
//!
//! A batch is applied in four phases: edge removals, vertex removals, vertex
//! additions, edge additions. Inside a phase requests keep batch order.
//! Removing something absent is a no-op; adding an edge twice keeps both
//! copies; adding a live vertex again is a no-op.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{Edge, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MutationRequest {
    AddEdge {
        src: VertexId,
        dst: VertexId,
        weight: f64,
    },
    RemoveEdge {
        src: VertexId,
        dst: VertexId,
    },
    AddVertex {
        id: VertexId,
        value: f64,
    },
    RemoveVertex {
        id: VertexId,
    },
}

impl MutationRequest {
    fn phase(&self) -> u8 {
        match self {
            MutationRequest::RemoveEdge { .. } => 0,
            MutationRequest::RemoveVertex { .. } => 1,
            MutationRequest::AddVertex { .. } => 2,
            MutationRequest::AddEdge { .. } => 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MutationError {
    #[error("add_edge {src} -> {dst}: endpoint {missing} does not exist")]
    MissingEndpoint {
        src: VertexId,
        dst: VertexId,
        missing: VertexId,
    },
    #[error("add_edge {src} -> {dst}: weight {weight} is negative or not a number")]
    InvalidWeight {
        src: VertexId,
        dst: VertexId,
        weight: f64,
    },
}

/// What a batch did to the vertex set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MutationEffects {
    /// Vertices removed by this batch (and not re-added by it).
    pub removed: BTreeSet<VertexId>,
    /// Newly live vertices with the value carried by their request.
    pub added: Vec<(VertexId, f64)>,
}

/// Applies `requests` to `graph` in phase order. On error the graph may be
/// partially mutated; the engine aborts the run in that case.
pub fn apply_mutations(
    requests: &[MutationRequest],
    graph: &mut Graph,
) -> Result<MutationEffects, MutationError> {
    let mut effects = MutationEffects::default();
    let mut ordered: Vec<&MutationRequest> = requests.iter().collect();
    ordered.sort_by_key(|r| r.phase());

    let mut removed_now = Vec::new();
    for request in ordered {
        match *request {
            MutationRequest::RemoveEdge { src, dst } => {
                graph.remove_edges(src, dst);
            }
            MutationRequest::RemoveVertex { id } => {
                if graph.kill(id) {
                    removed_now.push(id);
                    effects.removed.insert(id);
                }
            }
            MutationRequest::AddVertex { id, value } => {
                if !removed_now.is_empty() {
                    flush_in_edges(graph, &mut removed_now);
                }
                if graph.revive(id, Some(value)) {
                    effects.removed.remove(&id);
                    effects.added.push((id, value));
                }
            }
            MutationRequest::AddEdge { src, dst, weight } => {
                if !removed_now.is_empty() {
                    flush_in_edges(graph, &mut removed_now);
                }
                if weight.is_nan() || weight < 0.0 {
                    return Err(MutationError::InvalidWeight { src, dst, weight });
                }
                for endpoint in [src, dst] {
                    if !graph.is_live(endpoint) {
                        return Err(MutationError::MissingEndpoint {
                            src,
                            dst,
                            missing: endpoint,
                        });
                    }
                }
                graph.push_edge(Edge { src, dst, weight });
            }
        }
    }
    if !removed_now.is_empty() {
        flush_in_edges(graph, &mut removed_now);
    }
    Ok(effects)
}

fn flush_in_edges(graph: &mut Graph, removed: &mut Vec<VertexId>) {
    let dead: BTreeSet<VertexId> = removed.drain(..).collect();
    graph.remove_edges_into(|v| dead.contains(&v));
}
