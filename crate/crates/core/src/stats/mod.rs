//! Community × keiretsu contingency tables and Monte-Carlo independence
//! tests.

mod battery;
mod chisq;
mod contingency;
mod montecarlo;

use std::fmt;

use thiserror::Error;

pub use battery::{test_battery, BatteryEntry, BatteryOutcome, BatteryRow};
pub use chisq::chi_square_stat;
pub use contingency::{contingency, ContingencyOptions, ContingencyTable, DualPolicy};
pub use montecarlo::{mc_pvalue, round_margins, MIN_MC_SAMPLES};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("no keiretsu overlap: no network node has a keiretsu membership")]
    NoKeiretsuOverlap,
    #[error("degenerate table: {rows} non-empty row(s) × {cols} non-empty column(s)")]
    DegenerateTable { rows: usize, cols: usize },
    #[error("mc samples must be >= {MIN_MC_SAMPLES}, got {0}")]
    TooFewSamples(usize),
    #[error("ensemble is empty")]
    EmptyEnsemble,
}

/// Significance bands of the hypothesis tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    RejectedAt001,
    RejectedAt01,
    RejectedAt05,
    NotRejected,
}

impl Verdict {
    pub fn from_p(p: f64) -> Self {
        if p < 0.001 {
            Verdict::RejectedAt001
        } else if p < 0.01 {
            Verdict::RejectedAt01
        } else if p < 0.05 {
            Verdict::RejectedAt05
        } else {
            Verdict::NotRejected
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Verdict::RejectedAt001 => "***",
            Verdict::RejectedAt01 => "**",
            Verdict::RejectedAt05 => "*",
            Verdict::NotRejected => "",
        }
    }

    /// Independence rejected at α = .05.
    pub fn rejected(self) -> bool {
        self != Verdict::NotRejected
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::RejectedAt001 => "RejectedAt001",
            Verdict::RejectedAt01 => "RejectedAt01",
            Verdict::RejectedAt05 => "RejectedAt05",
            Verdict::NotRejected => "NotRejected",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub chi_square: f64,
    pub p_value: f64,
    pub mc_samples: usize,
    pub dof_note: String,
    pub verdict: Verdict,
}

impl TestResult {
    pub fn mrh_rejected(&self) -> &'static str {
        if self.verdict.rejected() {
            "YES"
        } else {
            "NO"
        }
    }

    /// `mrh_rejected,chi_square,p_value,stars` fields.
    pub fn csv_fields(&self) -> [String; 4] {
        [
            self.mrh_rejected().to_string(),
            format!("{:.4}", self.chi_square),
            format!("{:.6}", self.p_value),
            self.verdict.stars().to_string(),
        ]
    }
}
