use rayon::prelude::*;

use crate::graph::InvestorNetwork;
use crate::seed::derive_seed;

use super::{louvain_with, CommunityError, LouvainConfig, Partition};

/// Louvain partitions from independently seeded runs, in run order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEnsemble {
    pub runs: Vec<Partition>,
    pub seed: u64,
}

impl RunEnsemble {
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// Seed used by run `index`.
    pub fn run_seed(seed: u64, index: usize) -> u64 {
        derive_seed(seed, "louvain", index as u64)
    }
}

pub fn run_ensemble(
    net: &InvestorNetwork,
    run_count: usize,
    seed: u64,
) -> Result<RunEnsemble, CommunityError> {
    run_ensemble_with(net, run_count, seed, &LouvainConfig::default())
}

/// Runs execute in parallel; results are collected in run-index order so
/// the ensemble does not depend on scheduling.
pub fn run_ensemble_with(
    net: &InvestorNetwork,
    run_count: usize,
    seed: u64,
    cfg: &LouvainConfig,
) -> Result<RunEnsemble, CommunityError> {
    if run_count == 0 {
        return Err(CommunityError::InvalidRunCount);
    }
    let runs = (0..run_count)
        .into_par_iter()
        .map(|i| louvain_with(net, RunEnsemble::run_seed(seed, i), cfg).map(|o| o.partition))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunEnsemble { runs, seed })
}
