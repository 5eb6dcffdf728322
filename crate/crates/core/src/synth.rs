//! Synthetic survey data with planted keiretsu-aligned co-investment, for
//! exercising the pipeline without the proprietary survey.

use rand::distr::weighted::WeightedIndex;
use rand::seq::IndexedRandom;
use rand::{Rng as _, SeedableRng};
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::ProjectionConfig;
use crate::ingest::{
    FilterSpec, KeiretsuGroup, KeiretsuMembership, MacroAreaMap, MembershipBasis, Memberships,
    Ownership, SubsidiaryRecord, SECTORS,
};
use crate::pipeline::{analyze_records, PipelineConfig, PipelineError};
use crate::seed::{derive_seed, Rng};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid plant spec: {0}")]
    InvalidSpec(String),
    #[error("power curve needs at least 10 replicas, got {0}")]
    TooFewReplicas(usize),
    #[error("p_in = {p_in}, replica {replica}: {source}")]
    Pipeline {
        p_in: f64,
        replica: usize,
        source: PipelineError,
    },
}

/// Owner-count weights for 1, 2, 3, 4 and 5 owners: the ASEAN row of the
/// co-investor survey table.
pub const ASEAN_OWNER_COUNTS: [f64; 5] = [1530.0, 553.0, 259.0, 99.0, 58.0];

#[derive(Debug, Clone, PartialEq)]
pub struct PlantSpec {
    /// Number of keiretsu groups used, at most 6.
    pub groups: usize,
    pub investors_per_group: usize,
    pub unaffiliated_investors: usize,
    pub subsidiaries: usize,
    /// `owner_weights[k]` is the relative frequency of `k + 1` owners.
    pub owner_weights: Vec<f64>,
    /// Probability that each additional owner comes from the first owner's
    /// group (the unaffiliated pool counts as a group here).
    pub p_in: f64,
    /// `(mu, sigma)` of the log-normal paid-up capital.
    pub capital_lognormal: (f64, f64),
    pub countries: Vec<String>,
    pub sectors: Vec<u32>,
    /// Inclusive range of establishment years.
    pub years: (u16, u16),
    pub seed: u64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        PlantSpec {
            groups: 6,
            investors_per_group: 50,
            unaffiliated_investors: 0,
            subsidiaries: 2000,
            owner_weights: ASEAN_OWNER_COUNTS.to_vec(),
            p_in: 0.8,
            // mean exp(mu + sigma²/2) = 22,000
            capital_lognormal: (22_000f64.ln() - 0.5, 1.0),
            countries: [
                "Thailand",
                "Malaysia",
                "Indonesia",
                "Singapore",
                "China",
                "Taiwan",
                "Hong Kong",
                "USA",
                "Canada",
                "Germany",
                "United Kingdom",
                "Brazil",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            sectors: SECTORS.iter().map(|(c, _)| *c).collect(),
            years: (1960, 2005),
            seed: 42,
        }
    }
}

impl PlantSpec {
    pub fn total_investors(&self) -> usize {
        self.groups * self.investors_per_group + self.unaffiliated_investors
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        if self.groups == 0 || self.groups > KeiretsuGroup::ALL.len() {
            return bad("groups must be between 1 and 6");
        }
        if self.investors_per_group == 0 {
            return bad("investors_per_group must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.p_in) {
            return bad("p_in must lie in [0, 1]");
        }
        if self.owner_weights.is_empty()
            || self
                .owner_weights
                .iter()
                .any(|w| !(w.is_finite() && *w >= 0.0))
            || self.owner_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("owner_weights must be non-negative with a positive sum");
        }
        let max_owners = self
            .owner_weights
            .iter()
            .rposition(|w| *w > 0.0)
            .map_or(0, |k| k + 1);
        if max_owners > self.total_investors() {
            return Err(SynthError::InvalidSpec(format!(
                "up to {max_owners} owners per subsidiary but only {} investors",
                self.total_investors()
            )));
        }
        let (mu, sigma) = self.capital_lognormal;
        if !(mu.is_finite() && sigma.is_finite() && sigma >= 0.0) {
            return bad("capital_lognormal needs finite mu and sigma >= 0");
        }
        if self.countries.is_empty() || self.sectors.is_empty() {
            return bad("countries and sectors must be non-empty");
        }
        if self.years.0 > self.years.1 {
            return bad("year range is empty");
        }
        Ok(())
    }

    fn investor_id(&self, i: usize) -> String {
        format!("J{:04}", i + 1)
    }

    /// Pool of an investor: its group, or `groups` for unaffiliated firms.
    fn pool_of(&self, i: usize) -> usize {
        (i / self.investors_per_group).min(self.groups)
    }

    fn pool_range(&self, pool: usize) -> std::ops::Range<usize> {
        if pool < self.groups {
            pool * self.investors_per_group..(pool + 1) * self.investors_per_group
        } else {
            self.groups * self.investors_per_group..self.total_investors()
        }
    }
}

/// Draws an investor from `range` (when `inside`) or from outside it,
/// avoiding `taken`. The caller guarantees one is available.
fn draw(
    rng: &mut Rng,
    total: usize,
    range: &std::ops::Range<usize>,
    inside: bool,
    taken: &[usize],
) -> usize {
    loop {
        let i = if inside {
            rng.random_range(range.clone())
        } else {
            let outside = total - range.len();
            let k = rng.random_range(0..outside);
            if k < range.start {
                k
            } else {
                k + range.len()
            }
        };
        if !taken.contains(&i) {
            return i;
        }
    }
}

/// Subsidiary records and group memberships; deterministic per `spec.seed`.
pub fn generate(spec: &PlantSpec) -> Result<(Vec<SubsidiaryRecord>, Memberships), SynthError> {
    spec.validate()?;
    let mut rng = Rng::seed_from_u64(spec.seed);
    let total = spec.total_investors();

    let bases = [
        MembershipBasis::PresidentsClub,
        MembershipBasis::Top50Equity,
        MembershipBasis::Both,
    ];
    let entries = (0..spec.groups * spec.investors_per_group)
        .map(|i| KeiretsuMembership {
            investor_id: spec.investor_id(i),
            group: KeiretsuGroup::ALL[spec.pool_of(i)],
            basis: *bases.choose(&mut rng).expect("non-empty"),
        })
        .collect();
    let memberships = Memberships::new(entries).expect("ids are unique");

    let owner_dist = WeightedIndex::new(&spec.owner_weights)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let capital_dist = LogNormal::new(spec.capital_lognormal.0, spec.capital_lognormal.1)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let employees_dist = LogNormal::new(300f64.ln(), 0.8).expect("valid parameters");

    let mut records = Vec::with_capacity(spec.subsidiaries);
    for s in 0..spec.subsidiaries {
        let n_owners = owner_dist.sample(&mut rng) + 1;
        let first = rng.random_range(0..total);
        let range = spec.pool_range(spec.pool_of(first));
        let mut owners = vec![first];
        while owners.len() < n_owners {
            let same_left = range.len() - owners.iter().filter(|o| range.contains(o)).count();
            let other_left =
                (total - range.len()) - owners.iter().filter(|o| !range.contains(o)).count();
            let want_same = rng.random_bool(spec.p_in);
            let inside = matches!(
                (want_same, same_left > 0, other_left > 0),
                (true, true, _) | (false, true, false)
            );
            owners.push(draw(&mut rng, total, &range, inside, &owners));
        }

        let local_share = if rng.random_bool(0.3) {
            (rng.random_range(0.05..0.5f64) * 1e4).floor() / 1e4
        } else {
            0.0
        };
        let raw: Vec<f64> = owners.iter().map(|_| rng.random_range(0.2..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let owners = owners
            .iter()
            .zip(&raw)
            .map(|(&i, w)| Ownership {
                investor_id: spec.investor_id(i),
                share: ((1.0 - local_share) * w / sum * 1e4).floor() / 1e4,
            })
            .collect();
        let (y0, y1) = spec.years;
        records.push(SubsidiaryRecord {
            subsidiary_id: format!("S{:05}", s + 1),
            name: format!("Synthetic Subsidiary {}", s + 1),
            country: spec.countries.choose(&mut rng).expect("non-empty").clone(),
            sector_code: *spec.sectors.choose(&mut rng).expect("non-empty"),
            paidup_capital: Some((capital_dist.sample(&mut rng) * 10.0).round() / 10.0),
            num_employees: Some(employees_dist.sample(&mut rng).round() as u64),
            year_established: Some(rng.random_range(y0..=y1)),
            owners,
            local_share,
        });
    }
    Ok((records, memberships))
}

/// Share of (first owner, additional owner) pairs whose two investors sit in
/// the same group; unaffiliated pairs count as same-group.
pub fn same_group_fraction(records: &[SubsidiaryRecord], memberships: &Memberships) -> Option<f64> {
    let (mut same, mut pairs) = (0usize, 0usize);
    for r in records {
        let Some((first, rest)) = r.owners.split_first() else {
            continue;
        };
        let g = memberships.groups_of(&first.investor_id);
        for o in rest {
            pairs += 1;
            if memberships.groups_of(&o.investor_id) == g {
                same += 1;
            }
        }
    }
    (pairs > 0).then(|| same as f64 / pairs as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub p_in: f64,
    pub replicas: usize,
    pub rejections: usize,
}

impl PowerRow {
    pub fn rejection_rate(&self) -> f64 {
        self.rejections as f64 / self.replicas as f64
    }
}

/// Rejection rate at α = .05 of the full unweighted pipeline for each `p_in`.
/// Replica `r` generates data with seed `derive(spec.seed, "power", r)` and
/// analyses it with base seed `derive(cfg.seed, "power", r)`; the same
/// seeds are reused across `p_in` values.
pub fn power_curve(
    spec: &PlantSpec,
    p_in_values: &[f64],
    replicas: usize,
    cfg: &PipelineConfig,
) -> Result<Vec<PowerRow>, SynthError> {
    if replicas < 10 {
        return Err(SynthError::TooFewReplicas(replicas));
    }
    let areas = MacroAreaMap::seeded();
    p_in_values
        .iter()
        .map(|&p_in| {
            let outcomes = (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let s = PlantSpec {
                        p_in,
                        seed: derive_seed(spec.seed, "power", r as u64),
                        ..spec.clone()
                    };
                    let (records, memberships) = generate(&s)?;
                    let pcfg = PipelineConfig {
                        seed: derive_seed(cfg.seed, "power", r as u64),
                        ..cfg.clone()
                    };
                    analyze_records(
                        &records,
                        &memberships,
                        &areas,
                        &FilterSpec::default(),
                        &ProjectionConfig::default(),
                        &pcfg,
                    )
                    .map(|(_, a)| a.result.verdict.rejected())
                    .map_err(|source| SynthError::Pipeline {
                        p_in,
                        replica: r,
                        source,
                    })
                })
                .collect::<Result<Vec<bool>, _>>()?;
            Ok(PowerRow {
                p_in,
                replicas,
                rejections: outcomes.iter().filter(|r| **r).count(),
            })
        })
        .collect()
}
