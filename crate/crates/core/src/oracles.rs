//! Sequential reference implementations.
//!
//! Nothing here touches the engine or the built-in programs; only the graph
//! representation is shared. Vectors are indexed by vertex slot, and dead
//! slots (left by mutations) are ignored.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use ordered_float::OrderedFloat;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("edge {src} -> {dst} has negative weight {weight}")]
    NegativeWeight {
        src: VertexId,
        dst: VertexId,
        weight: f64,
    },
    #[error("source vertex {0} does not exist")]
    MissingSource(VertexId),
    #[error("empty input")]
    Empty,
}

/// Damped power iteration matching the fixed-round PageRank program:
/// `v'[t] = teleport/N + (1 - teleport) * sum_{u -> t} v[u] / outdeg(u)`,
/// contributions summed in ascending source order, dangling mass dropped.
pub fn pagerank_power_iteration(graph: &Graph, teleport: f64, iters: usize, init: f64) -> Vec<f64> {
    let cap = graph.capacity();
    let n = graph.num_vertices() as f64;
    let damping = 1.0 - teleport;

    // In-lists in ascending source order.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); cap];
    let mut degree = vec![0usize; cap];
    for u in graph.vertices() {
        let edges = graph.out_edges(u).expect("live vertex");
        degree[u.index()] = edges.len();
        for e in edges {
            incoming[e.dst.index()].push(u.index());
        }
    }

    let live: Vec<bool> = (0..cap)
        .map(|i| graph.is_live(VertexId::from_index(i)))
        .collect();
    let mut current: Vec<f64> = live.iter().map(|&l| if l { init } else { 0.0 }).collect();
    for _ in 0..iters {
        let share: Vec<f64> = (0..cap)
            .map(|u| {
                if degree[u] > 0 {
                    current[u] / degree[u] as f64
                } else {
                    0.0
                }
            })
            .collect();
        current = (0..cap)
            .map(|t| {
                if !live[t] {
                    return 0.0;
                }
                let mut sum = 0.0;
                for &u in &incoming[t] {
                    sum += share[u];
                }
                teleport / n + damping * sum
            })
            .collect();
    }
    current
}

/// Exact shortest distances; `+inf` for unreachable vertices.
pub fn dijkstra(graph: &Graph, source: VertexId) -> Result<Vec<f64>, OracleError> {
    if !graph.is_live(source) {
        return Err(OracleError::MissingSource(source));
    }
    if let Some(e) = graph.edges().find(|e| e.weight.is_nan() || e.weight < 0.0) {
        return Err(OracleError::NegativeWeight {
            src: e.src,
            dst: e.dst,
            weight: e.weight,
        });
    }
    let mut dist = vec![f64::INFINITY; graph.capacity()];
    let mut done = vec![false; graph.capacity()];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), source.0)));
    while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
        let u = u as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        for e in graph
            .out_edges(VertexId::from_index(u))
            .expect("live vertex")
        {
            let candidate = d + e.weight;
            let t = e.dst.index();
            if candidate < dist[t] {
                dist[t] = candidate;
                heap.push(Reverse((OrderedFloat(candidate), e.dst.0)));
            }
        }
    }
    Ok(dist)
}

/// Hop counts from `source` by breadth-first search; `+inf` if unreachable.
pub fn bfs_levels(graph: &Graph, source: VertexId) -> Result<Vec<f64>, OracleError> {
    if !graph.is_live(source) {
        return Err(OracleError::MissingSource(source));
    }
    let mut level = vec![u64::MAX; graph.capacity()];
    let mut queue = VecDeque::from([source]);
    level[source.index()] = 0;
    while let Some(u) = queue.pop_front() {
        let next = level[u.index()] + 1;
        for e in graph.out_edges(u).expect("live vertex") {
            if level[e.dst.index()] == u64::MAX {
                level[e.dst.index()] = next;
                queue.push_back(e.dst);
            }
        }
    }
    Ok(level
        .into_iter()
        .map(|l| {
            if l == u64::MAX {
                f64::INFINITY
            } else {
                l as f64
            }
        })
        .collect())
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links the larger root under the smaller, so roots are component minima.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Minimum vertex id of each vertex's weak component.
pub fn components_union_find(graph: &Graph) -> Vec<VertexId> {
    let mut set = DisjointSet::new(graph.capacity());
    for e in graph.edges() {
        set.union(e.src.index(), e.dst.index());
    }
    (0..graph.capacity())
        .map(|i| VertexId::from_index(set.find(i)))
        .collect()
}

pub fn global_max(values: &[f64]) -> Result<f64, OracleError> {
    values
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(OracleError::Empty)
}

/// Largest initial value among the vertices that can reach each vertex
/// (itself included). Sources are visited in descending value order, and a
/// search stops at vertices already claimed by a larger source.
pub fn reachable_max(graph: &Graph, values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = graph.vertices().map(|v| v.index()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut best: Vec<Option<f64>> = vec![None; graph.capacity()];
    for source in order {
        if best[source].is_some() {
            continue;
        }
        let value = values[source];
        best[source] = Some(value);
        let mut queue = VecDeque::from([VertexId::from_index(source)]);
        while let Some(u) = queue.pop_front() {
            for e in graph.out_edges(u).expect("live vertex") {
                if best[e.dst.index()].is_none() {
                    best[e.dst.index()] = Some(value);
                    queue.push_back(e.dst);
                }
            }
        }
    }
    best.into_iter()
        .map(|b| b.unwrap_or(f64::NEG_INFINITY))
        .collect()
}

/// Synchronous label propagation by direct simulation. Labels start as
/// vertex ids; each round every vertex takes the most frequent label among
/// its in-neighbours (lowest on ties) or keeps its own if it has none.
/// Stops after `max_rounds` rounds or the first round with no change.
pub fn label_propagation_simulation(graph: &Graph, max_rounds: u64) -> Vec<f64> {
    let cap = graph.capacity();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); cap];
    for e in graph.edges() {
        incoming[e.dst.index()].push(e.src.index());
    }
    let mut labels: Vec<u32> = (0..cap as u32).collect();
    for _ in 0..max_rounds {
        let next: Vec<u32> = (0..cap)
            .map(|v| {
                let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
                for &u in &incoming[v] {
                    *counts.entry(labels[u]).or_default() += 1;
                }
                let top = counts.values().copied().max();
                match top {
                    None => labels[v],
                    Some(top) => {
                        *counts
                            .iter()
                            .find(|&(_, &c)| c == top)
                            .expect("non-empty")
                            .0
                    }
                }
            })
            .collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    labels.into_iter().map(f64::from).collect()
}
