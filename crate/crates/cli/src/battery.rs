//! Battery files: a list of labelled filters, each tested under one or both
//! weightings.
//!
//! ```toml
//! [[entry]]
//! label = "ASEAN"
//! region = "ASEAN"
//! year = 2005                        # optional snapshot
//! sectors = [1100, 1200]             # optional
//! include_non_manufacturing = false  # optional
//! weightings = ["unweighted"]        # optional, default both
//! ```

use std::path::Path;

use coinvest_core::graph::{ProjectionConfig, Weighting};
use coinvest_core::ingest::{is_valid_sector, FilterSpec, MacroArea};
use coinvest_core::stats::{BatteryEntry, BatteryRow};
use serde::Deserialize;

use crate::output::Table;
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatteryFile {
    entry: Vec<EntrySpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntrySpec {
    label: String,
    region: Option<String>,
    year: Option<u16>,
    sectors: Option<Vec<u32>>,
    #[serde(default)]
    include_non_manufacturing: bool,
    weightings: Option<Vec<String>>,
}

fn weighting(name: &str) -> Result<Weighting, CliError> {
    match name {
        "unweighted" => Ok(Weighting::Unweighted),
        "weighted" => Ok(Weighting::CosineSimilarity),
        _ => Err(CliError::Config(format!(
            "unknown weighting `{name}` (valid: unweighted, weighted)"
        ))),
    }
}

pub fn parse(text: &str, min_shared: u32) -> Result<Vec<BatteryEntry>, CliError> {
    let file: BatteryFile =
        toml::from_str(text).map_err(|e| CliError::Config(format!("battery file: {e}")))?;
    let mut out = Vec::new();
    for e in file.entry {
        let macroarea = e
            .region
            .as_deref()
            .map(str::parse::<MacroArea>)
            .transpose()
            .map_err(|m| CliError::Config(format!("entry `{}`: {m}", e.label)))?;
        if let Some(c) = e.sectors.iter().flatten().find(|c| !is_valid_sector(**c)) {
            return Err(CliError::Config(format!(
                "entry `{}`: unknown sector code {c}",
                e.label
            )));
        }
        let filter = FilterSpec {
            macroarea,
            sector_codes: e.sectors.map(|s| s.into_iter().collect()),
            snapshot_year: e.year,
            manufacturing_only: !e.include_non_manufacturing,
        };
        let names = e
            .weightings
            .unwrap_or_else(|| vec!["unweighted".into(), "weighted".into()]);
        for name in names {
            out.push(BatteryEntry {
                label: e.label.clone(),
                filter: filter.clone(),
                projection: ProjectionConfig {
                    min_shared,
                    weighting: weighting(&name)?,
                },
            });
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("battery file has no entries".into()));
    }
    Ok(out)
}

pub fn load(path: &Path, min_shared: u32) -> Result<(Vec<u8>, Vec<BatteryEntry>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes).into_owned();
    let entries = parse(&text, min_shared)?;
    Ok((bytes, entries))
}

/// One line per label with the unweighted and weighted results side by side.
pub fn wide_table(rows: &[BatteryRow]) -> Vec<u8> {
    let mut header = vec!["label".to_string()];
    for w in [Weighting::Unweighted, Weighting::CosineSimilarity] {
        for col in &BatteryRow::HEADER[2..] {
            header.push(format!("{}_{col}", w.name()));
        }
    }
    let mut table = Table::new(&header);
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }
    for label in labels {
        let mut line = vec![label.to_string()];
        for w in [Weighting::Unweighted, Weighting::CosineSimilarity] {
            match rows.iter().find(|r| r.label == label && r.weighting == w) {
                Some(r) => line.extend(r.csv_fields().into_iter().skip(2)),
                None => line.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        table.row(&line);
    }
    table.into_bytes()
}
