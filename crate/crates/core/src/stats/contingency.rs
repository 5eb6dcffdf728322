use std::io::Write;

use log::info;

use crate::community::{align_runs, RunEnsemble};
use crate::graph::InvestorNetwork;
use crate::ingest::{KeiretsuGroup, Memberships};

use super::StatsError;

pub const UNAFFILIATED: &str = "Unaffiliated";

/// How an investor listed under several groups is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DualPolicy {
    /// One count in every group column it belongs to.
    #[default]
    EachGroup,
    /// Only the first group listed in the membership file.
    FirstListed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContingencyOptions {
    pub include_unaffiliated: bool,
    pub dual: DualPolicy,
}

/// Row-major joint frequency table with row and column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub cells: Vec<Vec<f64>>,
}

impl ContingencyTable {
    /// Generic labels `r0..`, `c0..`; every row must have the same length.
    pub fn from_cells(cells: Vec<Vec<f64>>) -> Self {
        let cols = cells.first().map_or(0, Vec::len);
        assert!(cells.iter().all(|r| r.len() == cols), "ragged table");
        ContingencyTable {
            row_labels: (0..cells.len()).map(|i| format!("r{i}")).collect(),
            col_labels: (0..cols).map(|j| format!("c{j}")).collect(),
            cells,
        }
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols()];
        for row in &self.cells {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Drops all-zero rows and columns.
    pub fn compact(&self) -> ContingencyTable {
        let rs = self.row_sums();
        let cs = self.col_sums();
        let keep_rows: Vec<usize> = (0..self.rows()).filter(|&i| rs[i] > 0.0).collect();
        let keep_cols: Vec<usize> = (0..self.cols()).filter(|&j| cs[j] > 0.0).collect();
        ContingencyTable {
            row_labels: keep_rows
                .iter()
                .map(|&i| self.row_labels[i].clone())
                .collect(),
            col_labels: keep_cols
                .iter()
                .map(|&j| self.col_labels[j].clone())
                .collect(),
            cells: keep_rows
                .iter()
                .map(|&i| keep_cols.iter().map(|&j| self.cells[i][j]).collect())
                .collect(),
        }
    }

    /// Heatmap-ready CSV: a `community` header cell, then column labels.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(sink, "community,{}", self.col_labels.join(","))?;
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(sink, "{label},{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Community × keiretsu table averaged over the ensemble. Run labels are
/// aligned to run 0 first (see [`align_runs`]).
pub fn contingency(
    net: &InvestorNetwork,
    ensemble: &RunEnsemble,
    memberships: &Memberships,
    opts: &ContingencyOptions,
) -> Result<ContingencyTable, StatsError> {
    if ensemble.runs.is_empty() {
        return Err(StatsError::EmptyEnsemble);
    }
    let groups: Vec<&[KeiretsuGroup]> = net
        .nodes()
        .iter()
        .map(|n| memberships.groups_of(&n.id))
        .collect();
    if groups.iter().all(|g| g.is_empty()) {
        return Err(StatsError::NoKeiretsuOverlap);
    }
    let dual = groups.iter().filter(|g| g.len() > 1).count();
    if dual > 0 {
        info!(
            "{dual} dual-affiliated investor(s) counted under {:?}",
            opts.dual
        );
    }

    let unaff_col = KeiretsuGroup::ALL.len();
    let ncols = unaff_col + usize::from(opts.include_unaffiliated);
    let aligned = align_runs(&ensemble.runs);
    let nrows = aligned.iter().flatten().max().map_or(0, |m| m + 1);
    let mut cells = vec![vec![0.0; ncols]; nrows];
    for labels in &aligned {
        for (v, &c) in labels.iter().enumerate() {
            match (groups[v], opts.dual) {
                ([], _) if opts.include_unaffiliated => cells[c][unaff_col] += 1.0,
                ([], _) => {}
                ([first, ..], DualPolicy::FirstListed) => cells[c][first.index()] += 1.0,
                (gs, DualPolicy::EachGroup) => {
                    for g in gs {
                        cells[c][g.index()] += 1.0;
                    }
                }
            }
        }
    }
    let runs = aligned.len() as f64;
    for v in cells.iter_mut().flatten() {
        *v /= runs;
    }
    let mut col_labels: Vec<String> = KeiretsuGroup::ALL
        .iter()
        .map(|g| g.name().to_string())
        .collect();
    if opts.include_unaffiliated {
        col_labels.push(UNAFFILIATED.to_string());
    }
    Ok(ContingencyTable {
        row_labels: (0..nrows).map(|c| format!("C{c}")).collect(),
        col_labels,
        cells,
    })
}
