use std::collections::HashMap;

use super::{CommunityError, Partition};

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information, `2 I(P;Q) / (H(P) + H(Q))`.
///
/// Two single-community partitions score 1; a single-community partition
/// against anything finer scores 0.
pub fn nmi(p: &Partition, q: &Partition) -> Result<f64, CommunityError> {
    if p.len() != q.len() {
        return Err(CommunityError::NodeSetMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Ok(1.0);
    }
    let n = p.len() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pc = vec![0usize; p.community_count()];
    let mut qc = vec![0usize; q.community_count()];
    for (&a, &b) in p.assignment().iter().zip(q.assignment()) {
        *joint.entry((a, b)).or_default() += 1;
        pc[a] += 1;
        qc[b] += 1;
    }
    let hp = entropy(pc.iter().copied(), n);
    let hq = entropy(qc.iter().copied(), n);
    if hp + hq == 0.0 {
        return Ok(1.0);
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(a, b), &c)| {
            let pab = c as f64 / n;
            pab * (pab * n * n / (pc[a] as f64 * qc[b] as f64)).ln()
        })
        .sum();
    Ok((2.0 * mi / (hp + hq)).clamp(0.0, 1.0))
}
