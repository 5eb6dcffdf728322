//! Degree-preserving randomization of the investor network (configuration
//! model by double-edge swaps) and the null battery built on it.

use std::collections::HashMap;

use log::warn;
use rand::{Rng as _, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{InvestorEdge, InvestorNetwork};
use crate::ingest::Memberships;
use crate::pipeline::{analyze_network, PipelineConfig, PipelineError};
use crate::seed::{derive_seed, Rng};
use crate::stats::TestResult;

#[derive(Debug, Error, PartialEq)]
pub enum NullModelError {
    #[error("rewiring needs at least 2 edges, network has {0}")]
    TooFewEdges(usize),
    #[error("swaps_per_edge must be >= 1")]
    InvalidSwaps,
    #[error("replicas must be >= 1")]
    InvalidReplicas,
    #[error("replica {replica}: {source}")]
    Replica {
        replica: usize,
        source: PipelineError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewireConfig {
    pub swaps_per_edge: usize,
    pub seed: u64,
    pub allow_multiedges: bool,
}

impl Default for RewireConfig {
    fn default() -> Self {
        RewireConfig {
            swaps_per_edge: 20,
            seed: 0,
            allow_multiedges: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewireOutcome {
    pub network: InvestorNetwork,
    pub attempts: usize,
    pub accepted: usize,
    /// No swap could be applied; `network` is the input unchanged.
    pub degenerate: bool,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Double-edge swaps: `(a,b),(c,d) → (a,d),(c,b)`, with the second edge's
/// orientation drawn at random. Swaps that would create a self-loop (or,
/// unless allowed, a duplicate edge) are rejected. Edge attributes stay at
/// their position in the edge list, so the weight multiset is preserved
/// while its placement is scrambled along with the structure.
pub fn configuration_rewire(
    net: &InvestorNetwork,
    cfg: &RewireConfig,
) -> Result<RewireOutcome, NullModelError> {
    if cfg.swaps_per_edge == 0 {
        return Err(NullModelError::InvalidSwaps);
    }
    let m = net.edge_count();
    if m < 2 {
        return Err(NullModelError::TooFewEdges(m));
    }
    let mut rng = Rng::seed_from_u64(cfg.seed);
    let mut edges: Vec<InvestorEdge> = net.edges().to_vec();
    let mut present: HashMap<(usize, usize), u32> = HashMap::with_capacity(m);
    for e in &edges {
        *present.entry((e.a, e.b)).or_default() += 1;
    }
    let attempts = cfg.swaps_per_edge * m;
    let mut accepted = 0;
    for _ in 0..attempts {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = (edges[i].a, edges[i].b);
        let (mut c, mut d) = (edges[j].a, edges[j].b);
        if rng.random_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b {
            continue;
        }
        let (n1, n2) = (key(a, d), key(c, b));
        if !cfg.allow_multiedges
            && (n1 == n2 || present.contains_key(&n1) || present.contains_key(&n2))
        {
            continue;
        }
        for old in [(a, b), (edges[j].a, edges[j].b)] {
            let k = key(old.0, old.1);
            let slot = present.get_mut(&k).expect("edge is present");
            *slot -= 1;
            if *slot == 0 {
                present.remove(&k);
            }
        }
        *present.entry(n1).or_default() += 1;
        *present.entry(n2).or_default() += 1;
        (edges[i].a, edges[i].b) = n1;
        (edges[j].a, edges[j].b) = n2;
        accepted += 1;
    }
    if accepted == 0 {
        warn!("no valid double-edge swap in {attempts} attempts; network returned unchanged");
        return Ok(RewireOutcome {
            network: net.clone(),
            attempts,
            accepted,
            degenerate: true,
        });
    }
    Ok(RewireOutcome {
        network: net.with_edges(edges),
        attempts,
        accepted,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullReplica {
    pub replica: usize,
    pub accepted_swaps: usize,
    pub degenerate: bool,
    pub result: TestResult,
}

/// Rewire, re-detect and re-test `replicas` times. Replica `i` rewires with
/// seed `derive(seed, "rewire", i)` and runs the pipeline with base seed
/// `derive(seed, "replica", i)`.
pub fn null_battery(
    net: &InvestorNetwork,
    memberships: &Memberships,
    replicas: usize,
    seed: u64,
    rewire: &RewireConfig,
    cfg: &PipelineConfig,
) -> Result<Vec<NullReplica>, NullModelError> {
    if replicas == 0 {
        return Err(NullModelError::InvalidReplicas);
    }
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let rcfg = RewireConfig {
                seed: derive_seed(seed, "rewire", i as u64),
                ..*rewire
            };
            let outcome = configuration_rewire(net, &rcfg)?;
            let pcfg = PipelineConfig {
                seed: derive_seed(seed, "replica", i as u64),
                ..cfg.clone()
            };
            let analysis = analyze_network(&outcome.network, memberships, &pcfg)
                .map_err(|source| NullModelError::Replica { replica: i, source })?;
            Ok(NullReplica {
                replica: i,
                accepted_swaps: outcome.accepted,
                degenerate: outcome.degenerate,
                result: analysis.result,
            })
        })
        .collect()
}

/// Fraction of `before`'s edges (as node pairs) still present in `after`.
pub fn surviving_edge_fraction(before: &InvestorNetwork, after: &InvestorNetwork) -> f64 {
    if before.edge_count() == 0 {
        return 1.0;
    }
    let kept: std::collections::HashSet<(usize, usize)> =
        after.edges().iter().map(|e| (e.a, e.b)).collect();
    let n = before
        .edges()
        .iter()
        .filter(|e| kept.contains(&(e.a, e.b)))
        .count();
    n as f64 / before.edge_count() as f64
}
