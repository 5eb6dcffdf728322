use crate::graph::InvestorNetwork;

use super::{CommunityError, Partition};

/// Weighted Newman–Girvan modularity at resolution 1.
pub fn modularity(net: &InvestorNetwork, p: &Partition) -> Result<f64, CommunityError> {
    modularity_with_resolution(net, p.assignment(), 1.0)
}

/// `Q = Σ_c [ in_c / m − γ (tot_c / 2m)² ]`, with `in_c` the weight inside
/// community `c` and `tot_c` the summed weighted degree of its nodes.
pub fn modularity_with_resolution(
    net: &InvestorNetwork,
    labels: &[usize],
    resolution: f64,
) -> Result<f64, CommunityError> {
    if labels.len() != net.node_count() {
        return Err(CommunityError::AssignmentMismatch {
            expected: net.node_count(),
            got: labels.len(),
        });
    }
    let m = net.total_weight();
    if m <= 0.0 {
        return Err(CommunityError::NothingToCluster);
    }
    let communities = labels.iter().max().map_or(0, |x| x + 1);
    let mut inside = vec![0.0; communities];
    let mut tot = vec![0.0; communities];
    for e in net.edges() {
        let (ca, cb) = (labels[e.a], labels[e.b]);
        tot[ca] += e.weight;
        tot[cb] += e.weight;
        if ca == cb {
            inside[ca] += e.weight;
        }
    }
    Ok(inside
        .iter()
        .zip(&tot)
        .map(|(i, t)| i / m - resolution * (t / (2.0 * m)).powi(2))
        .sum())
}
