//! Modularity-based community detection over the investor network.

mod align;
mod ensemble;
mod louvain;
mod modularity;
mod nmi;

use thiserror::Error;

pub use align::{align_runs, consensus};
pub use ensemble::{run_ensemble, run_ensemble_with, RunEnsemble};
pub use louvain::{louvain, louvain_with, LouvainConfig, LouvainOutcome};
pub use modularity::{modularity, modularity_with_resolution};
pub use nmi::nmi;

/// Default number of Louvain runs accumulated per analysis.
pub const DEFAULT_RUN_COUNT: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum CommunityError {
    #[error("nothing to cluster: network has no weighted edges")]
    NothingToCluster,
    #[error("partition assigns {got} nodes but the network has {expected}")]
    AssignmentMismatch { expected: usize, got: usize },
    #[error("run_count must be >= 1")]
    InvalidRunCount,
    #[error("partitions cover different node sets ({0} vs {1} nodes)")]
    NodeSetMismatch(usize, usize),
}

/// Community assignment per network node (indexed like
/// [`InvestorNetwork::nodes`](crate::graph::InvestorNetwork::nodes)).
/// Community ids are contiguous from 0, numbered by first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    modularity: Option<f64>,
}

impl Partition {
    /// Relabels `labels` to contiguous ids; the result carries no score.
    pub fn from_labels(labels: &[usize]) -> Self {
        Partition {
            assignment: normalize(labels),
            modularity: None,
        }
    }

    pub(crate) fn scored(labels: &[usize], q: f64) -> Self {
        Partition {
            assignment: normalize(labels),
            modularity: Some(q),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Modularity on the network it was detected in, when known.
    pub fn modularity(&self) -> Option<f64> {
        self.modularity
    }
}

pub(crate) fn normalize(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}
