use std::collections::BTreeMap;

use super::{sector_name, MacroArea, MacroAreaMap, SubsidiaryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Macroarea,
    Sector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GroupKey {
    Area(MacroArea),
    Sector(u32),
}

impl GroupKey {
    fn of(r: &SubsidiaryRecord, by: GroupBy, areas: &MacroAreaMap) -> Self {
        match by {
            GroupBy::Macroarea => GroupKey::Area(areas.area_of(&r.country)),
            GroupBy::Sector => GroupKey::Sector(r.sector_code),
        }
    }

    fn label(self) -> String {
        match self {
            GroupKey::Area(a) => a.name().to_string(),
            GroupKey::Sector(code) => match sector_name(code) {
                Some(name) => format!("{code} {name}"),
                None => code.to_string(),
            },
        }
    }
}

fn grouped<'a>(
    records: &'a [SubsidiaryRecord],
    by: GroupBy,
    areas: &MacroAreaMap,
) -> BTreeMap<GroupKey, Vec<&'a SubsidiaryRecord>> {
    let mut groups: BTreeMap<GroupKey, Vec<&SubsidiaryRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry(GroupKey::of(r, by, areas))
            .or_default()
            .push(r);
    }
    groups
}

/// Co-investors per subsidiary for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinvestorRow {
    pub group: String,
    pub records: usize,
    pub mean_owners: f64,
    /// Subsidiaries with 1, 2, 3, 4 and 5+ Japanese owners.
    pub histogram: [usize; 5],
    /// Fraction (not percent) with two or more owners.
    pub two_plus: f64,
}

impl CoinvestorRow {
    pub const HEADER: [&'static str; 9] =
        ["group", "n", "avg", "1", "2", "3", "4", "5+", "pct_2plus"];

    pub fn csv_fields(&self) -> Vec<String> {
        let mut v = vec![
            self.group.clone(),
            self.records.to_string(),
            format!("{:.2}", self.mean_owners),
        ];
        v.extend(self.histogram.iter().map(|c| c.to_string()));
        v.push(format!("{:.1}", self.two_plus * 100.0));
        v
    }
}

/// Owner-count summary per macroarea or sector; empty groups are omitted.
pub fn descriptive_stats(
    records: &[SubsidiaryRecord],
    group_by: GroupBy,
    areas: &MacroAreaMap,
) -> Vec<CoinvestorRow> {
    grouped(records, group_by, areas)
        .into_iter()
        .map(|(key, rs)| {
            let mut histogram = [0usize; 5];
            let mut owners = 0usize;
            for r in &rs {
                let n = r.owner_count();
                owners += n;
                histogram[n.clamp(1, 5) - 1] += 1;
            }
            let n = rs.len();
            CoinvestorRow {
                group: key.label(),
                records: n,
                mean_owners: owners as f64 / n as f64,
                histogram,
                two_plus: (n - histogram[0]) as f64 / n as f64,
            }
        })
        .collect()
}

/// Average size per group: employees and paid-up capital, each averaged over
/// the records that report it.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeRow {
    pub group: String,
    pub records: usize,
    pub mean_employees: Option<f64>,
    pub mean_capital: Option<f64>,
}

pub fn size_stats(
    records: &[SubsidiaryRecord],
    group_by: GroupBy,
    areas: &MacroAreaMap,
) -> Vec<SizeRow> {
    fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
        let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
    grouped(records, group_by, areas)
        .into_iter()
        .map(|(key, rs)| SizeRow {
            group: key.label(),
            records: rs.len(),
            mean_employees: mean(rs.iter().filter_map(|r| r.num_employees.map(|e| e as f64))),
            mean_capital: mean(rs.iter().filter_map(|r| r.paidup_capital)),
        })
        .collect()
}

/// Subsidiary count per country, most frequent first.
pub fn country_frequencies(records: &[SubsidiaryRecord]) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.country.as_str()).or_default() += 1;
    }
    let mut out: Vec<_> = counts
        .into_iter()
        .map(|(c, n)| (c.to_string(), n))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
