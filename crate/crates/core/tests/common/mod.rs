//! Brute-force reference implementations used as test oracles. They share no
//! code with the library and favour obviousness over speed.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Modularity from the dense adjacency matrix:
/// `Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Calls `f` with every set partition of `0..n` as a restricted growth string.
pub fn for_each_set_partition(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for c in 0..=max + 1 {
            labels.push(c);
            let next = if c > max { c } else { max };
            rec(labels, n, next, f);
            labels.pop();
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0];
    rec(&mut labels, n, 0, &mut f);
}

/// Highest modularity over all set partitions (exhaustive search).
pub fn optimal_modularity(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_set_partition(n, |labels| {
        best = best.max(dense_modularity(n, edges, labels));
    });
    best
}

/// Pearson χ² straight from `Σ (O − E)² / E`, skipping all-zero rows and
/// columns.
pub fn direct_chi_square(cells: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = cells.iter().map(|r| r.iter().sum()).collect();
    let ncols = cells.first().map_or(0, Vec::len);
    let cols: Vec<f64> = (0..ncols)
        .map(|j| cells.iter().map(|r| r[j]).sum())
        .collect();
    let n: f64 = rows.iter().sum();
    let mut chi = 0.0;
    for (i, row) in cells.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            if rows[i] > 0.0 && cols[j] > 0.0 {
                let e = rows[i] * cols[j] / n;
                chi += (o - e) * (o - e) / e;
            }
        }
    }
    chi
}

fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact fixed-margin p-value of the χ² statistic for a 2×2 table: the
/// hypergeometric mass of all tables with the same margins whose χ² is at
/// least the observed one.
pub fn exact_2x2_pvalue(t: [[u64; 2]; 2]) -> f64 {
    let r0 = t[0][0] + t[0][1];
    let r1 = t[1][0] + t[1][1];
    let c0 = t[0][0] + t[1][0];
    let n = r0 + r1;
    let chi = |a: u64| {
        let cells = vec![
            vec![a as f64, (r0 - a) as f64],
            vec![(c0 - a) as f64, (r1 + a - c0) as f64],
        ];
        direct_chi_square(&cells)
    };
    let observed = chi(t[0][0]);
    let lo = c0.saturating_sub(r1);
    let hi = r0.min(c0);
    (lo..=hi)
        .filter(|&a| chi(a) >= observed - 1e-9 * observed.max(1.0))
        .map(|a| choose(c0, a) * choose(n - c0, r0 - a) / choose(n, r0))
        .sum()
}

/// Kolmogorov–Smirnov distance between the sample's empirical CDF and U(0,1).
pub fn ks_uniform_distance(sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Pairwise shared-subsidiary counts by checking every investor pair against
/// every subsidiary. `owners[s]` lists the investors of subsidiary `s`.
pub fn naive_shared_counts(
    investors: usize,
    owners: &[Vec<usize>],
    min_shared: u32,
) -> BTreeMap<(usize, usize), u32> {
    let mut out = BTreeMap::new();
    for a in 0..investors {
        for b in a + 1..investors {
            let n = owners
                .iter()
                .filter(|list| list.contains(&a) && list.contains(&b))
                .count() as u32;
            if n >= min_shared && n > 0 {
                out.insert((a, b), n);
            }
        }
    }
    out
}

/// Cosine similarity of two dense vectors.
pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
