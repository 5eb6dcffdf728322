//! Run configuration: a TOML file mirrored by command-line flags. Flags win
//! over the file, the file wins over built-in defaults.

use std::path::Path;

use coinvest_core::community::LouvainConfig;
use coinvest_core::graph::{ProjectionConfig, Weighting};
use coinvest_core::ingest::{is_valid_sector, FilterSpec, MacroArea};
use coinvest_core::nullmodel::RewireConfig;
use coinvest_core::pipeline::PipelineConfig;
use coinvest_core::stats::{ContingencyOptions, DualPolicy, MIN_MC_SAMPLES};
use serde::{Deserialize, Serialize};

use crate::args::{AnalysisArgs, FilterArgs, NullArgs};
use crate::CliError;

/// Keys accepted in a `--config` file; all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub mc_samples: Option<usize>,
    pub min_shared: Option<u32>,
    pub weighted: Option<bool>,
    pub resolution: Option<f64>,
    pub include_unaffiliated: Option<bool>,
    pub dual_policy: Option<String>,
    pub threads: Option<usize>,
    pub swaps_per_edge: Option<usize>,
    pub replicas: Option<usize>,
    pub filter_region: Option<String>,
    pub sectors: Option<Vec<u32>>,
    pub year: Option<u16>,
    pub include_non_manufacturing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings, as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub runs: usize,
    pub mc_samples: usize,
    pub min_shared: u32,
    pub weighted: bool,
    pub resolution: f64,
    pub include_unaffiliated: bool,
    pub dual_policy: String,
    /// 0 means one worker per core.
    pub threads: usize,
    pub swaps_per_edge: usize,
    pub replicas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_region: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sectors: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year: Option<u16>,
    pub include_non_manufacturing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pipeline = PipelineConfig::default();
        let rewire = RewireConfig::default();
        RunConfig {
            seed: pipeline.seed,
            runs: pipeline.runs,
            mc_samples: pipeline.mc_samples,
            min_shared: ProjectionConfig::default().min_shared,
            weighted: false,
            resolution: pipeline.louvain.resolution,
            include_unaffiliated: pipeline.contingency.include_unaffiliated,
            dual_policy: "each-group".into(),
            threads: 0,
            swaps_per_edge: rewire.swaps_per_edge,
            replicas: 20,
            filter_region: None,
            sectors: None,
            year: None,
            include_non_manufacturing: false,
        }
    }
}

fn parse_dual(s: &str) -> Result<DualPolicy, CliError> {
    match s {
        "each-group" => Ok(DualPolicy::EachGroup),
        "first-listed" => Ok(DualPolicy::FirstListed),
        _ => Err(CliError::Config(format!(
            "unknown dual policy `{s}` (valid: each-group, first-listed)"
        ))),
    }
}

impl RunConfig {
    pub fn resolve(
        file: &FileConfig,
        filter: Option<&FilterArgs>,
        analysis: Option<&AnalysisArgs>,
        null: Option<&NullArgs>,
        threads: Option<usize>,
    ) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let a = analysis.cloned().unwrap_or_default();
        let f = filter.cloned().unwrap_or_default();
        let n = null.cloned().unwrap_or_default();
        let cfg = RunConfig {
            seed: a.seed.or(file.seed).unwrap_or(d.seed),
            runs: a.runs.or(file.runs).unwrap_or(d.runs),
            mc_samples: a.mc_samples.or(file.mc_samples).unwrap_or(d.mc_samples),
            min_shared: a.min_shared.or(file.min_shared).unwrap_or(d.min_shared),
            weighted: a.weighted || file.weighted.unwrap_or(d.weighted),
            resolution: a.resolution.or(file.resolution).unwrap_or(d.resolution),
            include_unaffiliated: a.include_unaffiliated
                || file.include_unaffiliated.unwrap_or(d.include_unaffiliated),
            dual_policy: a
                .dual_policy
                .clone()
                .or_else(|| file.dual_policy.clone())
                .unwrap_or(d.dual_policy),
            threads: threads.or(file.threads).unwrap_or(d.threads),
            swaps_per_edge: n
                .swaps_per_edge
                .or(file.swaps_per_edge)
                .unwrap_or(d.swaps_per_edge),
            replicas: n.replicas.or(file.replicas).unwrap_or(d.replicas),
            filter_region: f
                .filter_region
                .clone()
                .or_else(|| file.filter_region.clone()),
            sectors: if f.sector.is_empty() {
                file.sectors.clone()
            } else {
                Some(f.sector.clone())
            },
            year: f.year.or(file.year),
            include_non_manufacturing: f.include_non_manufacturing
                || file
                    .include_non_manufacturing
                    .unwrap_or(d.include_non_manufacturing),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.runs == 0 {
            return bad("runs must be >= 1".into());
        }
        if self.mc_samples < MIN_MC_SAMPLES {
            return bad(format!("mc_samples must be >= {MIN_MC_SAMPLES}"));
        }
        if self.min_shared == 0 {
            return bad("min_shared must be >= 1".into());
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return bad("resolution must be a positive number".into());
        }
        if self.swaps_per_edge == 0 {
            return bad("swaps_per_edge must be >= 1".into());
        }
        if self.replicas == 0 {
            return bad("replicas must be >= 1".into());
        }
        if let Some(codes) = &self.sectors {
            if let Some(c) = codes.iter().find(|c| !is_valid_sector(**c)) {
                return bad(format!("unknown sector code {c}"));
            }
        }
        parse_dual(&self.dual_policy)?;
        self.filter()?;
        Ok(())
    }

    pub fn filter(&self) -> Result<FilterSpec, CliError> {
        let macroarea = self
            .filter_region
            .as_deref()
            .map(|r| r.parse::<MacroArea>().map_err(CliError::Config))
            .transpose()?;
        Ok(FilterSpec {
            macroarea,
            sector_codes: self.sectors.as_ref().map(|s| s.iter().copied().collect()),
            snapshot_year: self.year,
            manufacturing_only: !self.include_non_manufacturing,
        })
    }

    /// Row label for results: the region (or "Overall") plus the snapshot year.
    pub fn label(&self) -> String {
        let region = match self.filter().ok().and_then(|f| f.macroarea) {
            Some(area) => area.name().to_string(),
            None => "Overall".into(),
        };
        match self.year {
            Some(y) => format!("{region} {y}"),
            None => region,
        }
    }

    pub fn projection(&self) -> ProjectionConfig {
        ProjectionConfig {
            min_shared: self.min_shared,
            weighting: if self.weighted {
                Weighting::CosineSimilarity
            } else {
                Weighting::Unweighted
            },
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            runs: self.runs,
            mc_samples: self.mc_samples,
            seed: self.seed,
            louvain: LouvainConfig {
                resolution: self.resolution,
            },
            contingency: ContingencyOptions {
                include_unaffiliated: self.include_unaffiliated,
                dual: parse_dual(&self.dual_policy).expect("validated"),
            },
        }
    }

    pub fn rewire(&self) -> RewireConfig {
        RewireConfig {
            swaps_per_edge: self.swaps_per_edge,
            seed: self.seed,
            allow_multiedges: false,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain values serialize")
    }
}
