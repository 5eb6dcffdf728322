//! End-to-end analysis: records → network → Louvain ensemble → contingency
//! table → Monte-Carlo χ² test.

use thiserror::Error;

use crate::community::{run_ensemble_with, CommunityError, LouvainConfig, RunEnsemble};
use crate::graph::{
    build_bipartite, project, BipartiteGraph, GraphError, InvestorNetwork, ProjectionConfig,
};
use crate::ingest::{apply_filter, FilterSpec, MacroAreaMap, Memberships, SubsidiaryRecord};
use crate::seed::derive_seed;
use crate::stats::{
    contingency, mc_pvalue, ContingencyOptions, ContingencyTable, StatsError, TestResult,
};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("no data: the filter selects no subsidiaries")]
    NoData,
    #[error("insufficient co-investment structure: {0}")]
    Insufficient(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl From<CommunityError> for PipelineError {
    fn from(e: CommunityError) -> Self {
        match e {
            CommunityError::NothingToCluster => PipelineError::Insufficient(e.to_string()),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<StatsError> for PipelineError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::NoKeiretsuOverlap | StatsError::DegenerateTable { .. } => {
                PipelineError::Insufficient(e.to_string())
            }
            other => PipelineError::Config(other.to_string()),
        }
    }
}

/// Settings shared by every analysis stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub runs: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub louvain: LouvainConfig,
    pub contingency: ContingencyOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            runs: crate::community::DEFAULT_RUN_COUNT,
            mc_samples: 9999,
            seed: 0,
            louvain: LouvainConfig::default(),
            contingency: ContingencyOptions::default(),
        }
    }
}

/// Outputs of one network analysis.
#[derive(Debug, Clone)]
pub struct NetworkAnalysis {
    pub ensemble: RunEnsemble,
    pub table: ContingencyTable,
    pub result: TestResult,
}

/// Ensemble, table and test on an already built network. Louvain runs use
/// sub-seeds of `cfg.seed` (stage `louvain`), the Monte-Carlo test stage `mc`.
pub fn analyze_network(
    net: &InvestorNetwork,
    memberships: &Memberships,
    cfg: &PipelineConfig,
) -> Result<NetworkAnalysis, PipelineError> {
    if net.edge_count() == 0 {
        return Err(PipelineError::Insufficient("network has no edges".into()));
    }
    let ensemble = run_ensemble_with(net, cfg.runs, cfg.seed, &cfg.louvain)?;
    let table = contingency(net, &ensemble, memberships, &cfg.contingency)?;
    let result = mc_pvalue(&table, cfg.mc_samples, derive_seed(cfg.seed, "mc", 0))?;
    Ok(NetworkAnalysis {
        ensemble,
        table,
        result,
    })
}

/// The labelled investor network for a filtered record set.
#[derive(Debug, Clone)]
pub struct BuiltNetwork {
    pub records: Vec<SubsidiaryRecord>,
    pub bipartite: BipartiteGraph,
    pub network: InvestorNetwork,
}

pub fn build_network(
    records: &[SubsidiaryRecord],
    memberships: &Memberships,
    areas: &MacroAreaMap,
    filter: &FilterSpec,
    projection: &ProjectionConfig,
) -> Result<BuiltNetwork, PipelineError> {
    let selected = apply_filter(records, filter, areas).records;
    if selected.is_empty() {
        return Err(PipelineError::NoData);
    }
    let bipartite = build_bipartite(&selected);
    let mut network = project(&bipartite, projection)?;
    if network.edge_count() == 0 {
        return Err(PipelineError::Insufficient(
            "no pair of investors co-owns enough subsidiaries".into(),
        ));
    }
    network.attach_memberships(memberships);
    Ok(BuiltNetwork {
        records: selected,
        bipartite,
        network,
    })
}

/// Filter, project and test in one call.
pub fn analyze_records(
    records: &[SubsidiaryRecord],
    memberships: &Memberships,
    areas: &MacroAreaMap,
    filter: &FilterSpec,
    projection: &ProjectionConfig,
    cfg: &PipelineConfig,
) -> Result<(BuiltNetwork, NetworkAnalysis), PipelineError> {
    let built = build_network(records, memberships, areas, filter, projection)?;
    let analysis = analyze_network(&built.network, memberships, cfg)?;
    Ok((built, analysis))
}
