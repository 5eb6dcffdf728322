use std::collections::HashMap;

use super::{
    cosine_similarity, BipartiteGraph, CapitalAllocation, GraphError, InvestorEdge,
    InvestorNetwork, InvestorNode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    Unweighted,
    CosineSimilarity,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Unweighted => "unweighted",
            Weighting::CosineSimilarity => "weighted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionConfig {
    /// Minimum number of co-owned subsidiaries for a link.
    pub min_shared: u32,
    pub weighting: Weighting,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            min_shared: 1,
            weighting: Weighting::Unweighted,
        }
    }
}

/// Links two investors when they co-own at least `min_shared` subsidiaries.
///
/// In cosine mode, subsidiaries without a recorded (positive) capital are
/// left out entirely: they neither count toward `shared_count` nor enter the
/// capital vectors. Nodes are the investors with at least one link, in
/// investor-id order.
pub fn project(bg: &BipartiteGraph, cfg: &ProjectionConfig) -> Result<InvestorNetwork, GraphError> {
    if cfg.min_shared == 0 {
        return Err(GraphError::InvalidMinShared);
    }
    let weighted = cfg.weighting == Weighting::CosineSimilarity;
    let owners = bg.owners_by_subsidiary(|e| !weighted || e.capital.is_some_and(|k| k > 0.0));

    let mut shared: HashMap<(usize, usize), u32> = HashMap::new();
    for list in &owners {
        for (x, &i) in list.iter().enumerate() {
            for &j in &list[x + 1..] {
                let key = if i < j { (i, j) } else { (j, i) };
                *shared.entry(key).or_default() += 1;
            }
        }
    }
    let mut pairs: Vec<((usize, usize), u32)> = shared
        .into_iter()
        .filter(|(_, c)| *c >= cfg.min_shared)
        .collect();
    pairs.sort_unstable();

    let mut local = vec![usize::MAX; bg.investors().len()];
    for ((a, b), _) in &pairs {
        local[*a] = 0;
        local[*b] = 0;
    }
    let mut nodes = Vec::new();
    for (i, slot) in local.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = nodes.len();
            nodes.push(InvestorNode::new(bg.investors()[i].clone()));
        }
    }

    let allocations: Vec<CapitalAllocation> = if weighted {
        let mut per: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bg.investors().len()];
        for e in bg.edges() {
            if let Some(k) = e.capital.filter(|k| *k > 0.0) {
                per[e.investor].push((e.subsidiary, k));
            }
        }
        per.into_iter()
            .map(CapitalAllocation::from_pairs)
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    let mut edges = Vec::with_capacity(pairs.len());
    for ((a, b), count) in pairs {
        let weight = if weighted {
            cosine_similarity(&allocations[a], &allocations[b])?
        } else {
            1.0
        };
        edges.push(InvestorEdge::new(local[a], local[b], count, weight));
    }
    InvestorNetwork::new(nodes, edges)
}
