use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::graph::InvestorNetwork;
use crate::seed::Rng;

use super::{modularity_with_resolution, CommunityError, Partition};

/// Smallest modularity improvement that counts as a move.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LouvainConfig {
    pub resolution: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig { resolution: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOutcome {
    pub partition: Partition,
    /// Modularity of the all-singletons start followed by the value after
    /// each local-move phase.
    pub level_modularity: Vec<f64>,
}

/// Community graph at one aggregation level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of edges folded inside each super-node.
    inner: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_network(net: &InvestorNetwork) -> Self {
        let adj = net.adjacency();
        let degree = adj
            .iter()
            .map(|nbrs| nbrs.iter().map(|(_, w)| w).sum())
            .collect();
        Level {
            inner: vec![0.0; adj.len()],
            adj,
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of `comm` on this level's graph.
    fn modularity(&self, comm: &[usize], two_m: f64, resolution: f64) -> f64 {
        let k = comm.iter().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for (i, nbrs) in self.adj.iter().enumerate() {
            tot[comm[i]] += self.degree[i];
            inside[comm[i]] += 2.0 * self.inner[i];
            for &(j, w) in nbrs {
                if comm[j] == comm[i] {
                    inside[comm[i]] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&tot)
            .map(|(i, t)| i / two_m - resolution * (t / two_m).powi(2))
            .sum()
    }

    /// Repeated shuffled passes of single-node moves. Returns whether any
    /// node changed community.
    fn local_moves(&self, comm: &mut [usize], two_m: f64, resolution: f64, rng: &mut Rng) -> bool {
        let n = self.len();
        let mut tot = self.degree.clone();
        let mut link = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut any_move = false;
        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let ci = comm[i];
                let ki = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let cj = comm[j];
                    if !seen[cj] {
                        seen[cj] = true;
                        touched.push(cj);
                    }
                    link[cj] += w;
                }
                tot[ci] -= ki;
                let gain = |c: usize, link_c: f64| link_c - resolution * tot[c] * ki / two_m;
                let mut best = ci;
                let mut best_gain = gain(ci, link[ci]);
                for &c in &touched {
                    let g = gain(c, link[c]);
                    // gains are in units of 2/two_m
                    if (g - best_gain) * 2.0 / two_m > MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                if best != ci {
                    comm[i] = best;
                    moved = true;
                }
                for c in touched.drain(..) {
                    link[c] = 0.0;
                    seen[c] = false;
                }
            }
            if !moved {
                return any_move;
            }
            any_move = true;
        }
    }

    /// Collapses each community into one node. `comm` must be contiguous.
    fn aggregate(&self, comm: &[usize], count: usize) -> Level {
        let mut inner = vec![0.0; count];
        let mut degree = vec![0.0; count];
        let mut between: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![Default::default(); count];
        for (i, nbrs) in self.adj.iter().enumerate() {
            let ci = comm[i];
            inner[ci] += self.inner[i];
            degree[ci] += self.degree[i];
            for &(j, w) in nbrs {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    inner[ci] += w / 2.0;
                } else {
                    *between[ci].entry(cj).or_default() += w;
                }
            }
        }
        Level {
            adj: between
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
            inner,
            degree,
        }
    }
}

/// Louvain with default settings seeded directly by `seed`.
pub fn louvain(net: &InvestorNetwork, seed: u64) -> Result<Partition, CommunityError> {
    louvain_with(net, seed, &LouvainConfig::default()).map(|o| o.partition)
}

/// Local moves and aggregation alternate until a phase moves no node. Node
/// visit order is reshuffled every pass; ties go to the current community,
/// then to the first neighbouring community encountered.
pub fn louvain_with(
    net: &InvestorNetwork,
    seed: u64,
    cfg: &LouvainConfig,
) -> Result<LouvainOutcome, CommunityError> {
    let two_m = 2.0 * net.total_weight();
    if net.edge_count() == 0 || two_m <= 0.0 {
        return Err(CommunityError::NothingToCluster);
    }
    let mut rng = Rng::seed_from_u64(seed);
    let mut level = Level::from_network(net);
    // membership of each original node in the current level's nodes
    let mut membership: Vec<usize> = (0..net.node_count()).collect();
    let singletons: Vec<usize> = (0..level.len()).collect();
    let mut trace = vec![level.modularity(&singletons, two_m, cfg.resolution)];

    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        let moved = level.local_moves(&mut comm, two_m, cfg.resolution, &mut rng);
        if !moved {
            break;
        }
        let comm = super::normalize(&comm);
        let count = comm.iter().max().map_or(0, |c| c + 1);
        trace.push(level.modularity(&comm, two_m, cfg.resolution));
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if count == level.len() {
            break;
        }
        level = level.aggregate(&comm, count);
    }

    let q = modularity_with_resolution(net, &membership, cfg.resolution)?;
    Ok(LouvainOutcome {
        partition: Partition::scored(&membership, q),
        level_modularity: trace,
    })
}
