//! Investor–subsidiary ownership graphs and their projection onto the
//! investor co-ownership network.

mod bipartite;
mod cosine;
mod export;
mod project;

use thiserror::Error;

use crate::ingest::{KeiretsuGroup, Memberships};

pub use bipartite::{build_bipartite, BipartiteGraph, OwnershipEdge};
pub use cosine::{cosine_similarity, CapitalAllocation};
pub use export::{bipartite_to_dot, network_to_dot, network_to_graphml};
pub use project::{project, ProjectionConfig, Weighting};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("degenerate allocation: capital vector has zero norm")]
    DegenerateAllocation,
    #[error("invalid allocation entry: {0}")]
    InvalidAllocation(String),
    #[error("min_shared must be >= 1")]
    InvalidMinShared,
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvestorNode {
    pub id: String,
    /// Keiretsu groups in membership-file order; empty for unaffiliated firms.
    pub groups: Vec<KeiretsuGroup>,
}

impl InvestorNode {
    pub fn new(id: impl Into<String>) -> Self {
        InvestorNode {
            id: id.into(),
            groups: Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        self.groups
            .iter()
            .map(|g| g.name())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Undirected edge stored once with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvestorEdge {
    pub a: usize,
    pub b: usize,
    pub shared_count: u32,
    pub weight: f64,
}

impl InvestorEdge {
    pub fn new(a: usize, b: usize, shared_count: u32, weight: f64) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        InvestorEdge {
            a,
            b,
            shared_count,
            weight,
        }
    }
}

/// Weighted undirected co-investment network between investors.
#[derive(Debug, Clone, PartialEq)]
pub struct InvestorNetwork {
    nodes: Vec<InvestorNode>,
    edges: Vec<InvestorEdge>,
}

impl InvestorNetwork {
    /// Validates endpoints, self-loops and weight range. Duplicate edges are
    /// allowed here so multigraph rewiring can be represented; see
    /// [`InvestorNetwork::has_duplicate_edges`].
    pub fn new(nodes: Vec<InvestorNode>, edges: Vec<InvestorEdge>) -> Result<Self, GraphError> {
        let n = nodes.len();
        for e in &edges {
            if e.a >= n || e.b >= n {
                return Err(GraphError::InvalidNetwork(format!(
                    "edge ({}, {}) references a missing node",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(GraphError::InvalidNetwork(format!("self-loop on {}", e.a)));
            }
            if e.a > e.b {
                return Err(GraphError::InvalidNetwork(format!(
                    "edge ({}, {}) not in canonical order",
                    e.a, e.b
                )));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return Err(GraphError::InvalidNetwork(format!(
                    "weight {} outside [0, 1]",
                    e.weight
                )));
            }
        }
        Ok(InvestorNetwork { nodes, edges })
    }

    /// Unweighted network on nodes `n0..n{count-1}`; convenient for fixtures.
    pub fn from_pairs(count: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let nodes = (0..count)
            .map(|i| InvestorNode::new(format!("n{i}")))
            .collect();
        let edges = pairs
            .iter()
            .map(|&(a, b)| InvestorEdge::new(a, b, 1, 1.0))
            .collect();
        InvestorNetwork::new(nodes, edges)
    }

    pub fn nodes(&self) -> &[InvestorNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[InvestorEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Per-node neighbour lists with edge weights.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        adj
    }

    pub fn has_duplicate_edges(&self) -> bool {
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        pairs.sort_unstable();
        pairs.windows(2).any(|w| w[0] == w[1])
    }

    /// Sets each node's keiretsu groups from the membership list.
    pub fn attach_memberships(&mut self, memberships: &Memberships) {
        for node in &mut self.nodes {
            node.groups = memberships.groups_of(&node.id).to_vec();
        }
    }

    pub(crate) fn with_edges(&self, edges: Vec<InvestorEdge>) -> Self {
        InvestorNetwork {
            nodes: self.nodes.clone(),
            edges,
        }
    }
}

/// Number of incident edges per node, in node order.
pub fn degree_sequence(net: &InvestorNetwork) -> Vec<usize> {
    let mut deg = vec![0; net.node_count()];
    for e in net.edges() {
        deg[e.a] += 1;
        deg[e.b] += 1;
    }
    deg
}
