//! Subsidiary survey records, keiretsu memberships and the filters applied
//! to them before any network is built.

mod csv_io;
mod describe;
mod filter;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use csv_io::{
    parse_investors, parse_macroareas, parse_memberships, parse_subsidiaries, write_macroareas,
    write_memberships, write_subsidiaries,
};
pub use describe::{
    country_frequencies, descriptive_stats, size_stats, CoinvestorRow, GroupBy, SizeRow,
};
pub use filter::{apply_filter, FilterSpec, Filtered};

/// Tolerance on `Σ owner shares + local_share ≤ 1`.
pub const SHARE_EPSILON: f64 = 1e-6;

/// Sector code carried by non-manufacturing subsidiaries.
pub const NON_MANUFACTURING: u32 = 0;

/// Manufacturing sector codes with their survey names.
pub const SECTORS: [(u32, &str); 18] = [
    (600, "Food"),
    (700, "Textiles"),
    (800, "Wood and Furniture"),
    (900, "Pulp and Paper"),
    (1000, "Publishing and Printing"),
    (1100, "Chemicals and Pharma"),
    (1200, "Petroleum and Coal Products (incl. Plastics)"),
    (1300, "Rubber and Leather Products"),
    (1400, "Refractories and Glass"),
    (1500, "Steel"),
    (1600, "Non-ferrous Metals"),
    (1700, "Metal Products"),
    (1800, "Machinery"),
    (1900, "Electric and Electronic Machinery and Devices"),
    (2000, "Transport Machinery and Shipbuilding"),
    (2100, "Automobiles and Parts"),
    (2200, "Precision Machinery"),
    (2300, "Miscellaneous Manufacturing"),
];

pub fn is_manufacturing(code: u32) -> bool {
    (600..=2300).contains(&code) && code.is_multiple_of(100)
}

pub fn is_valid_sector(code: u32) -> bool {
    code == NON_MANUFACTURING || is_manufacturing(code)
}

pub fn sector_name(code: u32) -> Option<&'static str> {
    SECTORS.iter().find(|(c, _)| *c == code).map(|(_, n)| *n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ownership {
    pub investor_id: String,
    pub share: f64,
}

/// One overseas subsidiary and its Japanese equity owners.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsidiaryRecord {
    pub subsidiary_id: String,
    pub name: String,
    pub country: String,
    pub sector_code: u32,
    /// Thousands of currency units; `None` when the survey left it blank.
    pub paidup_capital: Option<f64>,
    pub num_employees: Option<u64>,
    pub year_established: Option<u16>,
    pub owners: Vec<Ownership>,
    /// Aggregate share held by local (non-Japanese) investors.
    pub local_share: f64,
}

impl SubsidiaryRecord {
    pub fn owner_count(&self) -> usize {
        self.owners.len()
    }

    /// Checks every record-level invariant, returning the offending field
    /// name and a message on failure.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.subsidiary_id.is_empty() {
            return Err(("subsidiary_id", "empty id".into()));
        }
        if !is_valid_sector(self.sector_code) {
            return Err((
                "sector_code",
                format!("sector code {} is not a known code", self.sector_code),
            ));
        }
        if let Some(k) = self.paidup_capital {
            if !(k.is_finite() && k >= 0.0) {
                return Err(("paidup_capital", format!("capital {k} must be >= 0")));
            }
        }
        if !(0.0..=1.0).contains(&self.local_share) {
            return Err((
                "local_share",
                format!("share out of range: {}", self.local_share),
            ));
        }
        if self.owners.is_empty() {
            return Err(("owners", "no Japanese owner listed".into()));
        }
        let mut seen = BTreeSet::new();
        let mut total = self.local_share;
        for o in &self.owners {
            if !is_token(&o.investor_id) {
                return Err(("owners", format!("invalid investor id `{}`", o.investor_id)));
            }
            if !(o.share > 0.0 && o.share <= 1.0) {
                return Err((
                    "owners",
                    format!("share out of range: {} for {}", o.share, o.investor_id),
                ));
            }
            if !seen.insert(o.investor_id.as_str()) {
                return Err(("owners", format!("duplicate owner {}", o.investor_id)));
            }
            total += o.share;
        }
        if total > 1.0 + SHARE_EPSILON {
            return Err(("owners", format!("shares sum to {total} > 1")));
        }
        Ok(())
    }
}

/// Id tokens must survive the `id:share;id:share` owner encoding.
pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.contains([':', ';', ',', '"']) && s.trim() == s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvestorRecord {
    pub investor_id: String,
    pub name: String,
}

/// The six horizontal keiretsu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeiretsuGroup {
    Mitsui,
    Mitsubishi,
    Sumitomo,
    Sanwa,
    Fuyo,
    Ikkan,
}

impl KeiretsuGroup {
    pub const ALL: [KeiretsuGroup; 6] = [
        KeiretsuGroup::Mitsui,
        KeiretsuGroup::Mitsubishi,
        KeiretsuGroup::Sumitomo,
        KeiretsuGroup::Sanwa,
        KeiretsuGroup::Fuyo,
        KeiretsuGroup::Ikkan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KeiretsuGroup::Mitsui => "Mitsui",
            KeiretsuGroup::Mitsubishi => "Mitsubishi",
            KeiretsuGroup::Sumitomo => "Sumitomo",
            KeiretsuGroup::Sanwa => "Sanwa",
            KeiretsuGroup::Fuyo => "Fuyo",
            KeiretsuGroup::Ikkan => "Ikkan",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for KeiretsuGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeiretsuGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KeiretsuGroup::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let valid: Vec<_> = KeiretsuGroup::ALL.iter().map(|g| g.name()).collect();
                format!("unknown group `{}` (valid: {})", s.trim(), valid.join(", "))
            })
    }
}

/// Which membership criterion placed a firm in its group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MembershipBasis {
    PresidentsClub,
    Top50Equity,
    Both,
}

impl MembershipBasis {
    pub fn name(self) -> &'static str {
        match self {
            MembershipBasis::PresidentsClub => "PresidentsClub",
            MembershipBasis::Top50Equity => "Top50Equity",
            MembershipBasis::Both => "Both",
        }
    }
}

impl FromStr for MembershipBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            MembershipBasis::PresidentsClub,
            MembershipBasis::Top50Equity,
            MembershipBasis::Both,
        ];
        all.into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!(
                    "unknown basis `{}` (valid: PresidentsClub, Top50Equity, Both)",
                    s.trim()
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeiretsuMembership {
    pub investor_id: String,
    pub group: KeiretsuGroup,
    pub basis: MembershipBasis,
}

/// Membership list in file order, indexed by investor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Memberships {
    entries: Vec<KeiretsuMembership>,
    by_investor: BTreeMap<String, Vec<KeiretsuGroup>>,
}

impl Memberships {
    /// Fails on a repeated `(investor_id, group)` pair.
    pub fn new(entries: Vec<KeiretsuMembership>) -> Result<Self, String> {
        let mut by_investor: BTreeMap<String, Vec<KeiretsuGroup>> = BTreeMap::new();
        for m in &entries {
            let groups = by_investor.entry(m.investor_id.clone()).or_default();
            if groups.contains(&m.group) {
                return Err(format!(
                    "duplicate membership ({}, {})",
                    m.investor_id, m.group
                ));
            }
            groups.push(m.group);
        }
        Ok(Memberships {
            entries,
            by_investor,
        })
    }

    pub fn entries(&self) -> &[KeiretsuMembership] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Groups of an investor in file order; empty when unaffiliated.
    pub fn groups_of(&self, investor_id: &str) -> &[KeiretsuGroup] {
        self.by_investor
            .get(investor_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_dual_affiliated(&self, investor_id: &str) -> bool {
        self.groups_of(investor_id).len() > 1
    }

    pub fn dual_affiliated(&self) -> BTreeSet<&str> {
        self.by_investor
            .iter()
            .filter(|(_, g)| g.len() > 1)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

/// World macro-regions used by the geographic filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MacroArea {
    Asean,
    ChinaTaiwan,
    Eu,
    NorthAmerica,
    Other,
}

impl MacroArea {
    pub const ALL: [MacroArea; 5] = [
        MacroArea::Asean,
        MacroArea::ChinaTaiwan,
        MacroArea::Eu,
        MacroArea::NorthAmerica,
        MacroArea::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MacroArea::Asean => "ASEAN",
            MacroArea::ChinaTaiwan => "ChinaTaiwan",
            MacroArea::Eu => "EU",
            MacroArea::NorthAmerica => "NorthAmerica",
            MacroArea::Other => "Other",
        }
    }
}

impl fmt::Display for MacroArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MacroArea {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "asean" => Ok(MacroArea::Asean),
            "chinataiwan" | "china" => Ok(MacroArea::ChinaTaiwan),
            "eu" | "europe" => Ok(MacroArea::Eu),
            "northamerica" | "northernamerica" => Ok(MacroArea::NorthAmerica),
            "other" => Ok(MacroArea::Other),
            _ => Err(format!(
                "unknown macroarea `{}` (valid: ASEAN, ChinaTaiwan, EU, NorthAmerica, Other)",
                s.trim()
            )),
        }
    }
}

const DEFAULT_MACROAREAS: &str = include_str!("../../data/macroareas.csv");

/// Country → macro-region lookup. Countries are matched case-insensitively.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroAreaMap {
    entries: BTreeMap<String, (String, MacroArea)>,
}

impl MacroAreaMap {
    /// The shipped table: ASEAN 10, China with Hong Kong and Taiwan, the EU
    /// members of the survey period, USA and Canada.
    pub fn seeded() -> Self {
        parse_macroareas(DEFAULT_MACROAREAS.as_bytes()).expect("bundled macroarea table is valid")
    }

    pub fn insert(&mut self, country: &str, area: MacroArea) {
        self.entries.insert(
            country.trim().to_lowercase(),
            (country.trim().to_string(), area),
        );
    }

    pub fn get(&self, country: &str) -> Option<MacroArea> {
        self.entries
            .get(&country.trim().to_lowercase())
            .map(|(_, a)| *a)
    }

    /// Unknown countries fall into [`MacroArea::Other`].
    pub fn area_of(&self, country: &str) -> MacroArea {
        self.get(country).unwrap_or(MacroArea::Other)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, MacroArea)> {
        self.entries.values().map(|(c, a)| (c.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    /// 1-based line in the source, header included.
    pub line: u64,
    pub field: String,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, field `{}`: {}",
            self.line, self.field, self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("{} invalid row(s): {}", .0.len(), summarize(.0))]
    InvalidRows(Vec<RowError>),
}

fn summarize(errors: &[RowError]) -> String {
    let mut parts: Vec<String> = errors.iter().take(3).map(|e| e.to_string()).collect();
    if errors.len() > 3 {
        parts.push(format!("... and {} more", errors.len() - 3));
    }
    parts.join("; ")
}
