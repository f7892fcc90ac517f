//! Seriation permutations and index-range cluster labelling.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabeledDataset, ProximityMatrix};
use crate::error::{Error, Result};

/// Checks that `perm` is a bijection on `0..m`.
pub fn validate_permutation(perm: &[usize], m: usize) -> Result<()> {
    if perm.len() != m {
        return Err(Error::Permutation(format!("length {} for {m} rows", perm.len())));
    }
    let mut seen = vec![false; m];
    for (pos, &i) in perm.iter().enumerate() {
        if i >= m {
            return Err(Error::Permutation(format!("entry {i} at position {pos} out of range")));
        }
        if core::mem::replace(&mut seen[i], true) {
            return Err(Error::Permutation(format!("entry {i} repeated at position {pos}")));
        }
    }
    Ok(())
}

/// `P_o[i][j] = P[perm[i]][perm[j]]`, ids permuted alike.
pub fn reorder(p: &ProximityMatrix, perm: &[usize]) -> Result<ProximityMatrix> {
    let m = p.len();
    validate_permutation(perm, m)?;
    let mut values = Vec::with_capacity(m * m);
    for &pi in perm {
        let row = p.row(pi);
        values.extend(perm.iter().map(|&pj| row[pj]));
    }
    let ids = perm.iter().map(|&i| p.ids()[i].clone()).collect();
    Ok(ProximityMatrix::new_unchecked(ids, values))
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (pos, &i) in perm.iter().enumerate() {
        inv[i] = pos;
    }
    inv
}

/// Inclusive range of seriated positions sharing one label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterRange {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterRanges(pub Vec<ClusterRange>);

impl ClusterRanges {
    /// Ranges must satisfy `start <= end < m` and must not overlap.
    pub fn validate(&self, m: usize) -> Result<()> {
        let mut sorted: Vec<&ClusterRange> = self.0.iter().collect();
        sorted.sort_by_key(|r| r.start);
        for r in &sorted {
            if r.start > r.end || r.end >= m {
                return Err(Error::Ranges(format!(
                    "range [{}, {}] ({}) invalid for {m} rows",
                    r.start, r.end, r.label
                )));
            }
        }
        for w in sorted.windows(2) {
            if w[1].start <= w[0].end {
                return Err(Error::Ranges(format!(
                    "ranges [{}, {}] ({}) and [{}, {}] ({}) overlap",
                    w[0].start, w[0].end, w[0].label, w[1].start, w[1].end, w[1].label
                )));
            }
        }
        Ok(())
    }
}

/// Labels row `perm[i]` with the label of the range holding position `i`.
/// Rows outside every range are dropped; the result keeps the original row order.
pub fn apply_cluster_ranges(
    data: &Dataset,
    perm: &[usize],
    ranges: &ClusterRanges,
) -> Result<LabeledDataset> {
    let m = data.len();
    validate_permutation(perm, m)?;
    ranges.validate(m)?;
    if ranges.0.is_empty() {
        log::warn!("no cluster ranges given; labelled dataset is empty");
    }
    let mut label_of: Vec<Option<&str>> = vec![None; m];
    for r in &ranges.0 {
        for &row in &perm[r.start..=r.end] {
            label_of[row] = Some(&r.label);
        }
    }
    let (rows, labels): (Vec<usize>, Vec<String>) = label_of
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| (i, String::from(l))))
        .unzip();
    let base = if rows.is_empty() {
        // Empty selection of a valid schema.
        Dataset::new(Vec::new(), data.feature_names().to_vec(), Vec::new())?
    } else {
        data.select(&rows)?
    };
    LabeledDataset::new(base, labels)
}

/// Mean off-diagonal similarity inside the seriated block `[start, end]`.
/// A single-row block has no pairs and reports 1.
pub fn block_mean_similarity(p_ordered: &ProximityMatrix, start: usize, end: usize) -> f64 {
    let n = end + 1 - start;
    if n < 2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for i in start..=end {
        for j in start..=end {
            if i != j {
                sum += p_ordered.get(i, j);
            }
        }
    }
    sum / (n * (n - 1)) as f64
}

/// Turns flat cluster labels into contiguous seriated ranges. Clusters that
/// are not contiguous in `order`, or smaller than `min_size`, stay unlabelled.
pub fn ranges_from_clusters(order: &[usize], labels: &[usize], min_size: usize) -> ClusterRanges {
    let mut ranges = Vec::new();
    let mut start = 0;
    let mut seen: Vec<usize> = Vec::new();
    for pos in 1..=order.len() {
        if pos == order.len() || labels[order[pos]] != labels[order[start]] {
            let cluster = labels[order[start]];
            if !seen.contains(&cluster) {
                seen.push(cluster);
                if pos - start >= min_size.max(1) {
                    ranges.push(ClusterRange {
                        start,
                        end: pos - 1,
                        label: format!("c{}", ranges.len()),
                    });
                }
            } else {
                // Split cluster: drop the earlier range too.
                let first = ranges.iter().position(|r: &ClusterRange| labels[order[r.start]] == cluster);
                if let Some(k) = first {
                    ranges.remove(k);
                }
            }
            start = pos;
        }
    }
    for (k, r) in ranges.iter_mut().enumerate() {
        r.label = format!("c{k}");
    }
    ClusterRanges(ranges)
}
