//! Agglomerative clustering on `1 - P`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::ProximityMatrix;
use crate::error::{Error, Result};

/// Linkage criterion for merging clusters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Linkage::Average),
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Config(alloc::format!("unknown linkage {other:?}"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Average => "average",
            Linkage::Single => "single",
            Linkage::Complete => "complete",
        })
    }
}

/// One merge step. Leaves are `0..M`; the cluster formed by merge `k` is `M + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn from_merges(n_leaves: usize, merges: Vec<Merge>) -> Result<Self> {
        if n_leaves == 0 || merges.len() + 1 != n_leaves {
            return Err(Error::Config(alloc::format!(
                "{} merges cannot join {} leaves",
                merges.len(),
                n_leaves
            )));
        }
        let mut used = vec![false; 2 * n_leaves - 1];
        for (k, m) in merges.iter().enumerate() {
            for c in [m.left, m.right] {
                if c >= n_leaves + k || core::mem::replace(&mut used[c], true) {
                    return Err(Error::Config(alloc::format!("merge {k} reuses or forward-references {c}")));
                }
            }
        }
        Ok(Self { n_leaves, merges })
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Children of an internal node id (`>= M`).
    pub(crate) fn children(&self, node: usize) -> Option<(usize, usize)> {
        node.checked_sub(self.n_leaves)
            .map(|k| (self.merges[k].left, self.merges[k].right))
    }

    pub(crate) fn root(&self) -> usize {
        2 * self.n_leaves - 2
    }

    /// Flat cluster labels `0..k` from undoing the last `k - 1` merges.
    /// Labels are numbered in order of first appearance over the leaves.
    pub fn cut(&self, k: usize) -> Vec<usize> {
        let n = self.n_leaves;
        let k = k.clamp(1, n);
        let mut parent: Vec<usize> = (0..2 * n - 1).collect();
        for (step, m) in self.merges.iter().enumerate().take(n - k) {
            parent[m.left] = n + step;
            parent[m.right] = n + step;
        }
        let find = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let mut ids: Vec<(usize, usize)> = Vec::new();
        (0..n)
            .map(|leaf| {
                let root = find(leaf);
                match ids.iter().find(|(r, _)| *r == root) {
                    Some(&(_, label)) => label,
                    None => {
                        let label = ids.len();
                        ids.push((root, label));
                        label
                    }
                }
            })
            .collect()
    }
}

/// Hierarchical clustering of the dissimilarity `1 - P`.
///
/// Each step merges the closest pair of active clusters; ties go to the pair
/// with the lowest `(i, j)` matrix slot, where a merged cluster keeps the
/// lower slot of its two parts.
pub fn linkage(p: &ProximityMatrix, method: Linkage) -> Result<Dendrogram> {
    let m = p.len();
    if m < 2 {
        return Err(Error::Config(String::from("linkage needs at least two datapoints")));
    }
    let mut dist: Vec<f64> = p.values().iter().map(|v| 1.0 - v).collect();
    let d = |dist: &[f64], i: usize, j: usize| dist[i * m + j];

    let mut active = vec![true; m];
    let mut size = vec![1usize; m];
    let mut node_of: Vec<usize> = (0..m).collect();
    // nn[i] = closest active j > i (lowest j on ties)
    let scan = |dist: &[f64], active: &[bool], i: usize| -> usize {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &on) in active.iter().enumerate().skip(i + 1) {
            if on && (best == usize::MAX || d(dist, i, j) < best_d) {
                best = j;
                best_d = d(dist, i, j);
            }
        }
        best
    };
    let mut nn: Vec<usize> = (0..m).map(|i| scan(&dist, &active, i)).collect();

    let mut merges = Vec::with_capacity(m - 1);
    for step in 0..m - 1 {
        let mut a = usize::MAX;
        let mut best_d = f64::INFINITY;
        for i in 0..m {
            if active[i] && nn[i] != usize::MAX {
                let di = d(&dist, i, nn[i]);
                if a == usize::MAX || di < best_d {
                    a = i;
                    best_d = di;
                }
            }
        }
        let b = nn[a];
        merges.push(Merge {
            left: node_of[a],
            right: node_of[b],
            height: best_d,
            size: size[a] + size[b],
        });

        active[b] = false;
        for k in 0..m {
            if !active[k] || k == a {
                continue;
            }
            let (dak, dbk) = (d(&dist, a, k), d(&dist, b, k));
            let new = match method {
                Linkage::Average => {
                    (size[a] as f64 * dak + size[b] as f64 * dbk) / (size[a] + size[b]) as f64
                }
                Linkage::Single => dak.min(dbk),
                Linkage::Complete => dak.max(dbk),
            };
            dist[a * m + k] = new;
            dist[k * m + a] = new;
        }
        size[a] += size[b];
        node_of[a] = m + step;

        for k in 0..m {
            if !active[k] {
                continue;
            }
            if k == a || nn[k] == a || nn[k] == b {
                nn[k] = scan(&dist, &active, k);
            } else if k < a && nn[k] != usize::MAX {
                let (cur, new) = (d(&dist, k, nn[k]), d(&dist, k, a));
                if new < cur || (new == cur && a < nn[k]) {
                    nn[k] = a;
                }
            }
        }
    }
    Dendrogram::from_merges(m, merges)
}

/// Leaves in left-to-right order of the dendrogram.
pub fn leaf_order(d: &Dendrogram) -> Vec<usize> {
    let mut order = Vec::with_capacity(d.n_leaves());
    let mut stack = vec![d.root()];
    while let Some(node) = stack.pop() {
        match d.children(node) {
            Some((l, r)) => {
                stack.push(r);
                stack.push(l);
            }
            None => order.push(node),
        }
    }
    order
}
