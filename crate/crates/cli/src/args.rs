use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "coinvest",
    version,
    about = "Investor co-ownership networks, community detection and keiretsu alignment tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive tables: co-investors per subsidiary, sizes, countries.
    Stats(StatsCmd),
    /// Full pipeline on one filtered record set.
    Analyze(AnalyzeCmd),
    /// Repeat the analysis on degree-preserving rewirings of the network.
    Null(NullCmd),
    /// One test per entry of a battery file, unweighted and weighted.
    Battery(BatteryCmd),
    /// Write a synthetic dataset with planted keiretsu structure.
    Generate(GenerateCmd),
    /// Rejection rate of the test on synthetic data across planting strengths.
    Power(PowerCmd),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Inputs {
    /// Directory holding subsidiaries.csv, memberships.csv and optionally
    /// macroareas.csv.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub subsidiaries: Option<PathBuf>,
    #[arg(long)]
    pub memberships: Option<PathBuf>,
    /// Country to macroarea table (default: built-in mapping).
    #[arg(long)]
    pub macroareas: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FilterArgs {
    /// ASEAN, ChinaTaiwan, EU, NorthAmerica or Other.
    #[arg(long)]
    pub filter_region: Option<String>,
    /// Keep only these sector codes (repeat or comma-separate).
    #[arg(long, value_delimiter = ',')]
    pub sector: Vec<u32>,
    /// Snapshot: subsidiaries established in or before this year.
    #[arg(long)]
    pub year: Option<u16>,
    #[arg(long)]
    pub include_non_manufacturing: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalysisArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum co-owned subsidiaries for a link.
    #[arg(long)]
    pub min_shared: Option<u32>,
    /// Weight links by cosine similarity of capital allocations.
    #[arg(long)]
    pub weighted: bool,
    /// Louvain runs per analysis.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Louvain resolution.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Add a column for investors outside the six groups.
    #[arg(long)]
    pub include_unaffiliated: bool,
    /// each-group or first-listed.
    #[arg(long)]
    pub dual_policy: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NullArgs {
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub swaps_per_edge: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupByArg {
    Macroarea,
    Sector,
}

#[derive(Debug, Args)]
pub struct StatsCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, value_enum, default_value = "macroarea")]
    pub group_by: GroupByArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct NullCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub null: NullArgs,
}

#[derive(Debug, Args)]
pub struct BatteryCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// TOML file with `[[entry]]` tables.
    #[arg(long)]
    pub battery: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PlantArgs {
    #[arg(long, default_value_t = 6)]
    pub groups: usize,
    #[arg(long, default_value_t = 50)]
    pub investors_per_group: usize,
    #[arg(long, default_value_t = 0)]
    pub unaffiliated: usize,
    #[arg(long, default_value_t = 2000)]
    pub subsidiaries: usize,
}

#[derive(Debug, Args)]
pub struct GenerateCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub plant: PlantArgs,
    #[arg(long, default_value_t = 0.8)]
    pub p_in: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PowerCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub plant: PlantArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Planting strengths to evaluate (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_in: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub replicas: usize,
}
