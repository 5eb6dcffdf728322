use crate::graph::{ProjectionConfig, Weighting};
use crate::ingest::{FilterSpec, MacroAreaMap, Memberships, SubsidiaryRecord};
use crate::pipeline::{analyze_records, PipelineConfig, PipelineError};

use super::TestResult;

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryEntry {
    pub label: String,
    pub filter: FilterSpec,
    pub projection: ProjectionConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BatteryOutcome {
    Tested(TestResult),
    /// The filter selected no subsidiaries.
    NoData,
    /// Too little structure to test; carries the reason.
    Insufficient(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRow {
    pub label: String,
    pub weighting: Weighting,
    pub outcome: BatteryOutcome,
}

impl BatteryRow {
    pub const HEADER: [&'static str; 6] = [
        "label",
        "weighting",
        "mrh_rejected",
        "chi_square",
        "p_value",
        "stars",
    ];

    /// Failed rows carry their reason in the `mrh_rejected` column and leave
    /// the numeric columns blank.
    pub fn csv_fields(&self) -> [String; 6] {
        let [a, b, c, d] = match &self.outcome {
            BatteryOutcome::Tested(r) => r.csv_fields(),
            BatteryOutcome::NoData => [
                "no data".into(),
                String::new(),
                String::new(),
                String::new(),
            ],
            BatteryOutcome::Insufficient(_) => [
                "insufficient observations".into(),
                String::new(),
                String::new(),
                String::new(),
            ],
            BatteryOutcome::Failed(m) => [
                format!("error: {m}"),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        [
            self.label.clone(),
            self.weighting.name().to_string(),
            a,
            b,
            c,
            d,
        ]
    }

    pub fn result(&self) -> Option<&TestResult> {
        match &self.outcome {
            BatteryOutcome::Tested(r) => Some(r),
            _ => None,
        }
    }
}

/// One test per entry, in entry order. Per-entry failures are recorded in
/// the row rather than aborting the battery. Every entry uses the same
/// pipeline seed, so an entry reproduces a standalone analysis with the same
/// filter and projection.
pub fn test_battery(
    records: &[SubsidiaryRecord],
    memberships: &Memberships,
    areas: &MacroAreaMap,
    entries: &[BatteryEntry],
    cfg: &PipelineConfig,
) -> Vec<BatteryRow> {
    entries
        .iter()
        .map(|entry| {
            let outcome = match analyze_records(
                records,
                memberships,
                areas,
                &entry.filter,
                &entry.projection,
                cfg,
            ) {
                Ok((_, analysis)) => BatteryOutcome::Tested(analysis.result),
                Err(PipelineError::NoData) => BatteryOutcome::NoData,
                Err(PipelineError::Insufficient(m)) => BatteryOutcome::Insufficient(m),
                Err(e) => BatteryOutcome::Failed(e.to_string()),
            };
            BatteryRow {
                label: entry.label.clone(),
                weighting: entry.projection.weighting,
                outcome,
            }
        })
        .collect()
}
