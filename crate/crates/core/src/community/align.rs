use super::{normalize, Partition};

/// Relabels every run against a growing reference so that community ids
/// mean the same thing across runs.
///
/// Run 0 defines the reference. Each later run's communities are matched
/// one-to-one to reference communities greedily, largest node overlap
/// first; a community left unmatched opens a new reference label (with its
/// own members) that later runs can match.
pub fn align_runs(runs: &[Partition]) -> Vec<Vec<usize>> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let n = first.len();
    let mut reference: Vec<Vec<usize>> = members(first.assignment(), first.community_count());
    let mut aligned = vec![first.assignment().to_vec()];

    for run in &runs[1..] {
        assert_eq!(run.len(), n, "runs must cover the same nodes");
        let labels = run.assignment();
        let k = run.community_count();
        let mut overlap: Vec<(usize, usize, usize)> = Vec::new();
        let mut counts = vec![0usize; k];
        for (r, nodes) in reference.iter().enumerate() {
            for &v in nodes {
                counts[labels[v]] += 1;
            }
            for (c, cnt) in counts.iter_mut().enumerate() {
                if *cnt > 0 {
                    overlap.push((*cnt, c, r));
                    *cnt = 0;
                }
            }
        }
        overlap.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut to_ref = vec![usize::MAX; k];
        let mut ref_taken = vec![false; reference.len()];
        for (_, c, r) in overlap {
            if to_ref[c] == usize::MAX && !ref_taken[r] {
                to_ref[c] = r;
                ref_taken[r] = true;
            }
        }
        let own = members(labels, k);
        for (c, target) in to_ref.iter_mut().enumerate() {
            if *target == usize::MAX {
                *target = reference.len();
                reference.push(own[c].clone());
            }
        }
        aligned.push(labels.iter().map(|&c| to_ref[c]).collect());
    }
    aligned
}

fn members(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (v, &c) in labels.iter().enumerate() {
        out[c].push(v);
    }
    out
}

/// Majority aligned label per node (ties to the smaller label), relabeled
/// contiguously.
pub fn consensus(aligned: &[Vec<usize>]) -> Partition {
    let Some(first) = aligned.first() else {
        return Partition::from_labels(&[]);
    };
    let k = aligned.iter().flatten().max().map_or(0, |m| m + 1);
    let mut votes = vec![0usize; k];
    let labels: Vec<usize> = (0..first.len())
        .map(|v| {
            votes.iter_mut().for_each(|x| *x = 0);
            for run in aligned {
                votes[run[v]] += 1;
            }
            let mut best = 0;
            for (c, &n) in votes.iter().enumerate() {
                if n > votes[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Partition::from_labels(&normalize(&labels))
}
