//! Forest path proximity: the per-tree Jaccard index of root-to-leaf paths,
//! averaged over all trees.

use alloc::vec;
use alloc::vec::Vec;

use super::forest::Forest;
use super::tree::jaccard;
use crate::dataset::{Dataset, ProximityMatrix};
use crate::error::{Error, Result};

/// Node-id chains of every datapoint through one tree, stored flat.
struct TreePaths {
    offsets: Vec<usize>,
    ids: Vec<u32>,
}

impl TreePaths {
    #[inline]
    fn get(&self, i: usize) -> &[u32] {
        &self.ids[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[inline]
fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Proximity of every pair of rows of `data`. Every datapoint is dropped
/// down every tree, in-bag or not.
pub fn proximity_matrix(forest: &Forest, data: &Dataset) -> Result<ProximityMatrix> {
    if data.n_features() != forest.n_features() {
        return Err(Error::FeatureMismatch {
            expected: forest.n_features(),
            found: data.n_features(),
        });
    }
    let m = data.len();
    let b = forest.n_trees();

    let paths: Vec<TreePaths> = crate::par::map_indices(b, |t| {
        let tree = &forest.trees()[t];
        let mut offsets = Vec::with_capacity(m + 1);
        let mut ids = Vec::new();
        offsets.push(0);
        for row in data.rows() {
            tree.walk(row, |id| ids.push(id as u32));
            offsets.push(ids.len());
        }
        TreePaths { offsets, ids }
    });

    // Row i holds cells (i, j) for j > i; each cell sums trees in index order.
    let upper: Vec<Vec<f64>> = crate::par::map_indices(m, |i| {
        let mut acc = vec![0.0f64; m - i - 1];
        for tp in &paths {
            let pi = tp.get(i);
            for (k, cell) in acc.iter_mut().enumerate() {
                let pj = tp.get(i + 1 + k);
                *cell += jaccard(common_prefix(pi, pj), pi.len(), pj.len());
            }
        }
        let inv = b as f64;
        acc.iter_mut().for_each(|v| *v /= inv);
        acc
    });

    let mut values = vec![0.0f64; m * m];
    for (i, row) in upper.iter().enumerate() {
        values[i * m + i] = 1.0;
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
    }
    Ok(ProximityMatrix::new_unchecked(data.ids().to_vec(), values))
}

/// Smallest proximity the pair `(i, j)` can have given only their path
/// lengths: every tree shares at least the root.
pub fn root_sharing_lower_bound(forest: &Forest, xi: &[f64], xj: &[f64]) -> f64 {
    let sum: f64 = forest
        .trees()
        .iter()
        .map(|t| {
            let (li, lj) = (t.path(xi).len(), t.path(xj).len());
            1.0 / (li + lj - 1) as f64
        })
        .sum();
    sum / forest.n_trees() as f64
}
