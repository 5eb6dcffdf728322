use std::collections::BTreeSet;

use crate::ingest::SubsidiaryRecord;

use super::CapitalAllocation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwnershipEdge {
    /// Index into [`BipartiteGraph::investors`].
    pub investor: usize,
    /// Index into [`BipartiteGraph::subsidiaries`].
    pub subsidiary: usize,
    /// `share × paidup_capital`; `None` when the subsidiary has no capital on
    /// record.
    pub capital: Option<f64>,
}

/// Investors on one side, subsidiaries on the other. Both id lists are sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BipartiteGraph {
    investors: Vec<String>,
    subsidiaries: Vec<String>,
    edges: Vec<OwnershipEdge>,
}

impl BipartiteGraph {
    pub fn investors(&self) -> &[String] {
        &self.investors
    }

    pub fn subsidiaries(&self) -> &[String] {
        &self.subsidiaries
    }

    pub fn edges(&self) -> &[OwnershipEdge] {
        &self.edges
    }

    pub fn investor_index(&self, id: &str) -> Option<usize> {
        self.investors.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    /// Number of subsidiaries each investor owns a share of.
    pub fn ownership_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.investors.len()];
        for e in &self.edges {
            deg[e.investor] += 1;
        }
        deg
    }

    /// Owner lists per subsidiary, restricted to edges accepted by `keep`.
    pub(crate) fn owners_by_subsidiary(
        &self,
        keep: impl Fn(&OwnershipEdge) -> bool,
    ) -> Vec<Vec<usize>> {
        let mut owners = vec![Vec::new(); self.subsidiaries.len()];
        for e in self.edges.iter().filter(|e| keep(e)) {
            owners[e.subsidiary].push(e.investor);
        }
        owners
    }

    /// Capital invested by each investor, one sparse vector per investor over
    /// the subsidiaries that have a recorded capital.
    pub fn allocations(&self) -> Vec<CapitalAllocation> {
        let mut per: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.investors.len()];
        for e in &self.edges {
            if let Some(k) = e.capital {
                per[e.investor].push((e.subsidiary, k));
            }
        }
        per.into_iter()
            .map(|entries| {
                CapitalAllocation::from_pairs(entries).expect("edge capitals are non-negative")
            })
            .collect()
    }
}

/// One ownership edge per (owner, subsidiary) pair. Investors that own
/// nothing never appear.
pub fn build_bipartite(records: &[SubsidiaryRecord]) -> BipartiteGraph {
    let investors: Vec<String> = records
        .iter()
        .flat_map(|r| r.owners.iter().map(|o| o.investor_id.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let subsidiaries: Vec<String> = records
        .iter()
        .map(|r| r.subsidiary_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut graph = BipartiteGraph {
        investors,
        subsidiaries,
        edges: Vec::new(),
    };
    for r in records {
        let s = graph
            .subsidiaries
            .binary_search(&r.subsidiary_id)
            .expect("subsidiary indexed above");
        for o in &r.owners {
            let i = graph
                .investor_index(&o.investor_id)
                .expect("investor indexed above");
            graph.edges.push(OwnershipEdge {
                investor: i,
                subsidiary: s,
                capital: r.paidup_capital.map(|k| k * o.share),
            });
        }
    }
    graph
}
