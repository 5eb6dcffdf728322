use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::seed::rng_for;

use super::{chi_square_stat, ContingencyTable, StatsError, TestResult, Verdict};

pub const MIN_MC_SAMPLES: usize = 100;

/// Samples per independently seeded chunk.
const CHUNK: usize = 1024;

/// Relative slack when comparing a sampled χ² to the observed one, so that
/// tables tied with the observed one count as "at least as extreme".
const TIE_TOLERANCE: f64 = 1e-9;

/// Rounds non-negative margins to integers summing to `round(Σ margins)`
/// by the largest-remainder method. Ties go to the earlier entry.
pub fn round_margins(margins: &[f64]) -> Vec<u64> {
    let target = margins.iter().sum::<f64>().round() as u64;
    let mut out: Vec<u64> = margins.iter().map(|m| m.floor() as u64).collect();
    let assigned: u64 = out.iter().sum();
    let mut order: Vec<usize> = (0..margins.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = margins[a] - margins[a].floor();
        let rb = margins[b] - margins[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(target.saturating_sub(assigned) as usize) {
        out[i] += 1;
    }
    out
}

/// Fixed-margin sampler: a table with the given margins is a random
/// matching of the row-labelled items to the column-labelled items.
struct MarginSampler {
    row_of_item: Vec<u32>,
    col_items: Vec<u32>,
    ncols: usize,
    /// `total / (row_i · col_j)`, row-major.
    inv_expected: Vec<f64>,
    total: f64,
}

impl MarginSampler {
    fn new(rows: &[u64], cols: &[u64]) -> Self {
        let total: u64 = rows.iter().sum();
        let expand = |m: &[u64]| -> Vec<u32> {
            m.iter()
                .enumerate()
                .flat_map(|(i, &n)| std::iter::repeat_n(i as u32, n as usize))
                .collect()
        };
        let mut inv_expected = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                inv_expected.push(total as f64 / (r as f64 * c as f64));
            }
        }
        MarginSampler {
            row_of_item: expand(rows),
            col_items: expand(cols),
            ncols: cols.len(),
            inv_expected,
            total: total as f64,
        }
    }

    /// χ² of one random table, via `Σ O²/E − N`.
    fn sample(&self, rng: &mut crate::seed::Rng, cols: &mut [u32], counts: &mut [u32]) -> f64 {
        cols.copy_from_slice(&self.col_items);
        cols.shuffle(rng);
        counts.iter_mut().for_each(|c| *c = 0);
        for (&r, &c) in self.row_of_item.iter().zip(cols.iter()) {
            counts[r as usize * self.ncols + c as usize] += 1;
        }
        let s: f64 = counts
            .iter()
            .zip(&self.inv_expected)
            .filter(|(o, _)| **o > 0)
            .map(|(&o, inv)| f64::from(o) * f64::from(o) * inv)
            .sum();
        s - self.total
    }
}

/// Monte-Carlo p-value of the χ² statistic under independence with both
/// margins fixed.
///
/// Margins of an averaged table are rounded with [`round_margins`]; rows or
/// columns whose rounded margin is zero drop out of the sampling. The
/// estimate is `(1 + #{χ²_sim ≥ χ²_obs}) / (samples + 1)`. Samples are drawn
/// in chunks with their own derived seeds, so the result depends only on
/// `(t, samples, seed)`.
pub fn mc_pvalue(
    t: &ContingencyTable,
    samples: usize,
    seed: u64,
) -> Result<TestResult, StatsError> {
    if samples < MIN_MC_SAMPLES {
        return Err(StatsError::TooFewSamples(samples));
    }
    let observed = chi_square_stat(t)?;
    let compact = t.compact();
    let rows: Vec<u64> = round_margins(&compact.row_sums())
        .into_iter()
        .filter(|&m| m > 0)
        .collect();
    let cols: Vec<u64> = round_margins(&compact.col_sums())
        .into_iter()
        .filter(|&m| m > 0)
        .collect();
    if rows.len() < 2 || cols.len() < 2 {
        return Err(StatsError::DegenerateTable {
            rows: rows.len(),
            cols: cols.len(),
        });
    }
    let sampler = MarginSampler::new(&rows, &cols);
    let threshold = observed - TIE_TOLERANCE * observed.abs().max(1.0);
    let chunks = samples.div_ceil(CHUNK);
    let extreme: usize = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, "mc", k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut cols_buf = vec![0u32; sampler.col_items.len()];
            let mut counts = vec![0u32; sampler.inv_expected.len()];
            (0..n)
                .filter(|_| sampler.sample(&mut rng, &mut cols_buf, &mut counts) >= threshold)
                .count()
        })
        .sum();
    let p_value = (1 + extreme) as f64 / (samples + 1) as f64;
    Ok(TestResult {
        chi_square: observed,
        p_value,
        mc_samples: samples,
        dof_note: format!(
            "{}x{} table; Monte-Carlo p with fixed margins (N = {}), asymptotic dof {} not used",
            rows.len(),
            cols.len(),
            sampler.total,
            (rows.len() - 1) * (cols.len() - 1)
        ),
        verdict: Verdict::from_p(p_value),
    })
}
