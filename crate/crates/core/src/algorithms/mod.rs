//! Built-in vertex programs.

mod components;
mod label_propagation;
mod max_value;
mod pagerank;
mod shortest_path;

use std::fmt;
use std::str::FromStr;

pub use components::{wcc_program, ConnectedComponents};
pub use label_propagation::{label_propagation_program, LabelPropagation, CHANGES_AGGREGATOR};
pub use max_value::{max_value_program, MaxValue};
pub use pagerank::{
    pagerank_initial_value_insensitivity_check, pagerank_program, PageRank, PageRankConfig,
};
pub use shortest_path::{bfs_program, sssp_program, ShortestPaths};

/// Stable names used for dispatch from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    PageRank,
    MaxValue,
    Sssp,
    Bfs,
    Wcc,
    LabelProp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::PageRank,
        Algorithm::MaxValue,
        Algorithm::Sssp,
        Algorithm::Bfs,
        Algorithm::Wcc,
        Algorithm::LabelProp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PageRank => "pagerank",
            Algorithm::MaxValue => "maxvalue",
            Algorithm::Sssp => "sssp",
            Algorithm::Bfs => "bfs",
            Algorithm::Wcc => "wcc",
            Algorithm::LabelProp => "labelprop",
        }
    }

    pub fn needs_source(self) -> bool {
        matches!(self, Algorithm::Sssp | Algorithm::Bfs)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!(
                    "unknown algorithm `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}
