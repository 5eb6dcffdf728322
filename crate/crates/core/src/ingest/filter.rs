use std::collections::BTreeSet;

use log::warn;

use super::{is_manufacturing, MacroArea, MacroAreaMap, SubsidiaryRecord};

/// Record selection for one analysis. The default selects everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterSpec {
    pub macroarea: Option<MacroArea>,
    pub sector_codes: Option<BTreeSet<u32>>,
    /// Keeps subsidiaries established in or before this year. Records with
    /// no establishment year are dropped while this is set.
    pub snapshot_year: Option<u16>,
    pub manufacturing_only: bool,
}

impl FilterSpec {
    pub fn is_empty(&self) -> bool {
        *self == FilterSpec::default()
    }

    pub fn accepts(&self, r: &SubsidiaryRecord, areas: &MacroAreaMap) -> bool {
        if self.manufacturing_only && !is_manufacturing(r.sector_code) {
            return false;
        }
        if let Some(codes) = &self.sector_codes {
            if !codes.contains(&r.sector_code) {
                return false;
            }
        }
        if let Some(year) = self.snapshot_year {
            match r.year_established {
                Some(y) if y <= year => {}
                _ => return false,
            }
        }
        if let Some(area) = self.macroarea {
            if areas.area_of(&r.country) != area {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub records: Vec<SubsidiaryRecord>,
    /// Countries missing from the mapping table, routed to `Other`. Only
    /// collected while a macroarea filter is active.
    pub unmapped_countries: BTreeSet<String>,
}

pub fn apply_filter(
    records: &[SubsidiaryRecord],
    spec: &FilterSpec,
    areas: &MacroAreaMap,
) -> Filtered {
    let mut unmapped = BTreeSet::new();
    if spec.macroarea.is_some() {
        for r in records {
            if areas.get(&r.country).is_none() && unmapped.insert(r.country.clone()) {
                warn!("country `{}` has no macroarea; treated as Other", r.country);
            }
        }
    }
    Filtered {
        records: records
            .iter()
            .filter(|r| spec.accepts(r, areas))
            .cloned()
            .collect(),
        unmapped_countries: unmapped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Ownership;

    fn rec(id: &str, country: &str, sector: u32, year: Option<u16>) -> SubsidiaryRecord {
        SubsidiaryRecord {
            subsidiary_id: id.into(),
            name: id.into(),
            country: country.into(),
            sector_code: sector,
            paidup_capital: Some(100.0),
            num_employees: None,
            year_established: year,
            owners: vec![Ownership {
                investor_id: "A".into(),
                share: 1.0,
            }],
            local_share: 0.0,
        }
    }

    #[test]
    fn empty_spec_is_identity() {
        let rs = vec![
            rec("1", "Thailand", 600, None),
            rec("2", "Peru", 0, Some(2000)),
        ];
        let out = apply_filter(&rs, &FilterSpec::default(), &MacroAreaMap::seeded());
        assert_eq!(out.records, rs);
        assert!(out.unmapped_countries.is_empty());
    }

    #[test]
    fn asean_keeps_thailand_only() {
        let rs = vec![
            rec("1", "Thailand", 600, None),
            rec("2", "Germany", 600, None),
        ];
        let spec = FilterSpec {
            macroarea: Some(MacroArea::Asean),
            ..Default::default()
        };
        let out = apply_filter(&rs, &spec, &MacroAreaMap::seeded());
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].country, "Thailand");
    }

    #[test]
    fn snapshot_year_is_inclusive_upper_bound() {
        let rs = vec![
            rec("1", "Thailand", 600, Some(1970)),
            rec("2", "Thailand", 600, Some(1990)),
            rec("3", "Thailand", 600, Some(1975)),
            rec("4", "Thailand", 600, None),
        ];
        let spec = FilterSpec {
            snapshot_year: Some(1975),
            ..Default::default()
        };
        let ids: Vec<_> = apply_filter(&rs, &spec, &MacroAreaMap::seeded())
            .records
            .into_iter()
            .map(|r| r.subsidiary_id)
            .collect();
        assert_eq!(ids, vec!["1", "3"]);
    }

    #[test]
    fn unmapped_country_goes_to_other_with_warning() {
        let rs = vec![
            rec("1", "Atlantis", 600, None),
            rec("2", "Thailand", 600, None),
        ];
        let spec = FilterSpec {
            macroarea: Some(MacroArea::Other),
            ..Default::default()
        };
        let out = apply_filter(&rs, &spec, &MacroAreaMap::seeded());
        assert_eq!(out.records.len(), 1);
        assert!(out.unmapped_countries.contains("Atlantis"));
    }

    #[test]
    fn manufacturing_and_sector_filters() {
        let rs = vec![
            rec("1", "Thailand", 0, None),
            rec("2", "Thailand", 1100, None),
            rec("3", "Thailand", 2100, None),
        ];
        let spec = FilterSpec {
            manufacturing_only: true,
            sector_codes: Some([2100].into_iter().collect()),
            ..Default::default()
        };
        let out = apply_filter(&rs, &spec, &MacroAreaMap::seeded());
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].sector_code, 2100);
    }
}
