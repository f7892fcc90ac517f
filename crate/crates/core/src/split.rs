//! Binary split primitives shared by the unsupervised and supervised forests.

use alloc::{format, vec, vec::Vec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An internal node's routing rule: go left iff `x[feature] <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

impl Split {
    #[inline]
    pub fn child(&self, x: &[f64]) -> usize {
        if x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

/// Midpoints between consecutive distinct values of an ascending-sorted slice,
/// each paired with the number of values lying at or below it.
pub fn candidate_thresholds(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for k in 1..sorted.len() {
        let (lo, hi) = (sorted[k - 1], sorted[k]);
        if hi > lo {
            let mut mid = lo + (hi - lo) / 2.0;
            // Adjacent floats: the midpoint may round up onto `hi`.
            if mid >= hi {
                mid = lo;
            }
            out.push((mid, k));
        }
    }
    out
}

/// Walks from the root (index 0) to a leaf, calling `visit` on every node id.
pub(crate) fn walk<F>(split_of: F, x: &[f64], mut visit: impl FnMut(usize))
where
    F: Fn(usize) -> Option<Split>,
{
    let mut id = 0;
    loop {
        visit(id);
        match split_of(id) {
            Some(s) => id = s.child(x),
            None => return,
        }
    }
}

/// Checks a node table: ids match positions, children in range, every
/// non-root node has exactly one parent and is reachable from the root.
pub(crate) fn validate_tree(
    n: usize,
    node: impl Fn(usize) -> (usize, Option<Split>),
) -> Result<()> {
    if n == 0 {
        return Err(Error::Dataset("tree has no nodes".into()));
    }
    let mut parent_count = vec![0u32; n];
    for i in 0..n {
        let (id, split) = node(i);
        if id != i {
            return Err(Error::Dataset(format!("node at position {i} has id {id}")));
        }
        if let Some(s) = split {
            for c in [s.left, s.right] {
                if c >= n || c == 0 {
                    return Err(Error::Dataset(format!("node {i} has invalid child {c}")));
                }
                parent_count[c] += 1;
            }
            if s.left == s.right {
                return Err(Error::Dataset(format!("node {i} has identical children")));
            }
        }
    }
    if let Some(i) = (1..n).find(|&i| parent_count[i] != 1) {
        return Err(Error::Dataset(format!(
            "node {i} has {} parents",
            parent_count[i]
        )));
    }
    // n - 1 edges with unique parents: connected iff every node is reachable.
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        if core::mem::replace(&mut seen[i], true) {
            return Err(Error::Dataset(format!("cycle through node {i}")));
        }
        if let (_, Some(s)) = node(i) {
            stack.push(s.left);
            stack.push(s.right);
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Dataset(format!("node {i} unreachable from root")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn thresholds_skip_ties() {
        let c = candidate_thresholds(&[1.0, 1.0, 2.0, 4.0, 4.0]);
        assert_eq!(c, vec![(1.5, 2), (3.0, 3)]);
        assert!(candidate_thresholds(&[3.0, 3.0]).is_empty());
        assert!(candidate_thresholds(&[]).is_empty());
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_below_upper() {
        let lo = 1.0_f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let c = candidate_thresholds(&[lo, hi]);
        assert_eq!(c.len(), 1);
        assert!(c[0].0 >= lo && c[0].0 < hi);
    }
}
