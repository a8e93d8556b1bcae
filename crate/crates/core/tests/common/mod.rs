#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pregel::{Graph, GraphBuilder, MutationRequest, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn builder(n: usize, directed: bool) -> GraphBuilder {
    let mut b = GraphBuilder::new(directed);
    for i in 0..n {
        b.vertex(&i.to_string());
    }
    b
}

/// Directed graph where every vertex has out-degree in `1..=2*avg-1`.
pub fn random_sinkless(rng: &mut impl Rng, n: usize, avg_degree: usize) -> Graph {
    let mut b = builder(n, true);
    for u in 0..n {
        let degree = rng.gen_range(1..=2 * avg_degree - 1);
        for _ in 0..degree {
            let v = rng.gen_range(0..n);
            b.edge(&u.to_string(), &v.to_string(), None).unwrap();
        }
    }
    b.build()
}

/// Directed graph with `m` uniformly random edges; weights are either 1 or
/// multiples of 1/4 in `[0, 25]` (exact in binary floating point).
pub fn random_directed(rng: &mut impl Rng, n: usize, m: usize, weighted: bool) -> Graph {
    let mut b = builder(n, true);
    for _ in 0..m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let w = weighted.then(|| f64::from(rng.gen_range(0..=100u32)) / 4.0);
        b.edge(&u.to_string(), &v.to_string(), w).unwrap();
    }
    b.build()
}

/// Undirected (symmetrized) graph with `m` input edges and, if requested,
/// integer vertex values.
pub fn random_undirected(rng: &mut impl Rng, n: usize, m: usize, with_values: bool) -> Graph {
    let mut b = builder(n, false);
    for _ in 0..m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        b.edge(&u.to_string(), &v.to_string(), None).unwrap();
    }
    if with_values {
        for i in 0..n {
            b.value(&i.to_string(), f64::from(rng.gen_range(-1000..1000i32)));
        }
    }
    b.build()
}

pub fn cycle(n: usize) -> Graph {
    let mut b = builder(n, true);
    for i in 0..n {
        b.edge(&i.to_string(), &((i + 1) % n).to_string(), None)
            .unwrap();
    }
    b.build()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Graph as a set of live vertices plus a multiset of weighted edges.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyOracle {
    pub live: BTreeSet<u32>,
    pub edges: BTreeMap<u32, Vec<(u32, u64)>>,
}

impl AdjacencyOracle {
    pub fn of(graph: &Graph) -> Self {
        let live: BTreeSet<u32> = graph.vertices().map(|v| v.0).collect();
        let mut edges: BTreeMap<u32, Vec<(u32, u64)>> =
            live.iter().map(|&v| (v, Vec::new())).collect();
        for e in graph.edges() {
            edges
                .get_mut(&e.src.0)
                .unwrap()
                .push((e.dst.0, e.weight.to_bits()));
        }
        for list in edges.values_mut() {
            list.sort_unstable();
        }
        AdjacencyOracle { live, edges }
    }

    /// Removes first, then adds; missing removes are ignored.
    pub fn apply(&mut self, batch: &[MutationRequest]) {
        for r in batch {
            if let MutationRequest::RemoveEdge { src, dst } = *r {
                if let Some(list) = self.edges.get_mut(&src.0) {
                    list.retain(|&(d, _)| d != dst.0);
                }
            }
        }
        for r in batch {
            if let MutationRequest::RemoveVertex { id } = *r {
                if self.live.remove(&id.0) {
                    self.edges.remove(&id.0);
                    for list in self.edges.values_mut() {
                        list.retain(|&(d, _)| d != id.0);
                    }
                }
            }
        }
        for r in batch {
            if let MutationRequest::AddVertex { id, .. } = *r {
                if self.live.insert(id.0) {
                    self.edges.insert(id.0, Vec::new());
                }
            }
        }
        for r in batch {
            if let MutationRequest::AddEdge { src, dst, weight } = *r {
                assert!(self.live.contains(&src.0) && self.live.contains(&dst.0));
                let list = self.edges.get_mut(&src.0).unwrap();
                list.push((dst.0, weight.to_bits()));
                list.sort_unstable();
            }
        }
    }
}

/// A shuffled batch of `size` requests over ids `0..id_space`, restricted so
/// that every add_edge endpoint exists once removes and vertex adds are done.
pub fn random_mutation_batch(
    rng: &mut impl Rng,
    graph: &Graph,
    id_space: u32,
    size: usize,
) -> Vec<MutationRequest> {
    let mut batch = Vec::with_capacity(size);
    let structural = size / 2;
    for _ in 0..structural {
        let a = VertexId(rng.gen_range(0..id_space));
        let b = VertexId(rng.gen_range(0..id_space));
        batch.push(match rng.gen_range(0..10) {
            0..=5 => MutationRequest::RemoveEdge { src: a, dst: b },
            6 | 7 => MutationRequest::RemoveVertex { id: a },
            _ => MutationRequest::AddVertex {
                id: a,
                value: f64::from(rng.gen_range(0..10u32)),
            },
        });
    }
    // Vertex set after the removal and add-vertex phases.
    let mut oracle = AdjacencyOracle::of(graph);
    oracle.apply(&batch);
    let live: Vec<u32> = oracle.live.iter().copied().collect();
    for _ in structural..size {
        batch.push(MutationRequest::AddEdge {
            src: VertexId(*live.choose(rng).unwrap()),
            dst: VertexId(*live.choose(rng).unwrap()),
            weight: f64::from(rng.gen_range(1..5u32)),
        });
    }
    batch.shuffle(rng);
    batch
}
