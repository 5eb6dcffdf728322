use super::GraphError;

/// Sparse capital vector keyed by subsidiary index, sorted by key.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CapitalAllocation {
    entries: Vec<(usize, f64)>,
}

impl CapitalAllocation {
    /// Entries must be finite and non-negative; repeated keys are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self, GraphError> {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().collect();
        if let Some((k, v)) = entries.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(GraphError::InvalidAllocation(format!("{k} -> {v}")));
        }
        entries.sort_by_key(|(k, _)| *k);
        entries.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 += next.1;
                true
            } else {
                false
            }
        });
        Ok(CapitalAllocation { entries })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &CapitalAllocation) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Cosine of the angle between two capital vectors over the union of their
/// supports; missing entries count as zero.
pub fn cosine_similarity(a: &CapitalAllocation, b: &CapitalAllocation) -> Result<f64, GraphError> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(GraphError::DegenerateAllocation);
    }
    // rounding can push proportional vectors a hair past 1
    Ok((a.dot(b) / (na * nb)).clamp(0.0, 1.0))
}
