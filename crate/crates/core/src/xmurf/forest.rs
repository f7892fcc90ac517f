//! Growing unsupervised trees against virtual noise.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::impurity::balanced_gain;
use super::noise::{noise_cdf, standardize, NoiseKind};
use super::tree::{PathSet, Tree, TreeNode};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};
use crate::split::{candidate_thresholds, Split};

/// An ensemble of fully grown unsupervised trees.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    n_features: usize,
    seed: u64,
    feature_names: Vec<String>,
}

impl Forest {
    pub fn from_parts(
        trees: Vec<Tree>,
        n_features: usize,
        seed: u64,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Config("forest needs at least one tree".into()));
        }
        for tree in &trees {
            if let Some(s) = tree.nodes().iter().filter_map(|n| n.split).find(|s| s.feature >= n_features) {
                return Err(Error::FeatureMismatch {
                    expected: n_features,
                    found: s.feature + 1,
                });
            }
        }
        Ok(Self {
            trees,
            n_features,
            seed,
            feature_names,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// One path set per tree for `x`.
    pub fn paths(&self, x: &[f64]) -> Vec<PathSet> {
        self.trees.iter().map(|t| t.path(x)).collect()
    }
}

/// Number of features tried at each split: `floor(sqrt(q))`, at least one.
pub fn features_per_split(q: usize) -> usize {
    (libm::floor(libm::sqrt(q as f64)) as usize).max(1)
}

/// Fits `n_trees` unsupervised trees. Tree `b` draws from substream `b` of
/// `seed`, so the forest is identical however the trees are scheduled.
pub fn fit(data: &Dataset, n_trees: usize, seed: u64) -> Result<Forest> {
    if data.len() < 2 {
        return Err(Error::Dataset("clustering needs at least two datapoints".into()));
    }
    if n_trees == 0 {
        return Err(Error::Config("number of trees must be at least 1".into()));
    }
    let trees = crate::par::map_indices(n_trees, |b| {
        let mut rng = substream(seed, b as u64);
        grow_tree(data, &mut rng)
    });
    if trees.iter().all(|t| t.len() == 1) {
        log::warn!("no tree could split the data; all datapoints are identical in every feature");
    }
    Ok(Forest {
        trees,
        n_features: data.n_features(),
        seed,
        feature_names: data.feature_names().to_vec(),
    })
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn grow_tree(data: &Dataset, rng: &mut StreamRng) -> Tree {
    let m = data.len();
    let q = data.n_features();
    let q_split = features_per_split(q);
    let bag: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();

    let mut nodes = vec![TreeNode {
        id: 0,
        split: None,
        real_count: bag.len(),
        noise_kind: None,
    }];
    // LIFO with the right child pushed first: left subtrees are grown first.
    let mut pending: Vec<(usize, Vec<usize>)> = vec![(0, bag.clone())];
    let mut values: Vec<f64> = Vec::with_capacity(m);

    while let Some((id, rows)) = pending.pop() {
        if rows.len() <= 1 {
            continue;
        }
        let kind = NoiseKind::ALL[rng.random_range(0..NoiseKind::ALL.len())];
        nodes[id].noise_kind = Some(kind);
        let mut features = rand::seq::index::sample(rng, q, q_split).into_vec();
        features.sort_unstable();

        let n = rows.len() as f64;
        let mut best: Option<Candidate> = None;
        for &f in &features {
            values.clear();
            values.extend(rows.iter().map(|&r| data.row(r)[f]));
            values.sort_unstable_by(f64::total_cmp);
            let (lo, hi) = (values[0], values[values.len() - 1]);
            if !(hi > lo) {
                continue;
            }
            for (tau, real_left) in candidate_thresholds(&values) {
                let z = standardize(tau, lo, hi).expect("non-degenerate range");
                let noise_left = n * noise_cdf(kind, z);
                let gain = balanced_gain(n, real_left as f64, noise_left);
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Candidate {
                        gain,
                        feature: f,
                        threshold: tau,
                    });
                }
            }
        }
        // Gini gain is never negative, so a fully grown tree splits whenever
        // any feature offers a threshold; zero-gain splits (two points around
        // a symmetric CDF's centre) are still taken.
        let Some(best) = best else {
            continue;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| data.row(r)[best.feature] <= best.threshold);
        let left = nodes.len();
        let right = left + 1;
        for (child, count) in [(left, left_rows.len()), (right, right_rows.len())] {
            nodes.push(TreeNode {
                id: child,
                split: None,
                real_count: count,
                noise_kind: None,
            });
        }
        nodes[id].split = Some(Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        });
        pending.push((right, right_rows));
        pending.push((left, left_rows));
    }
    Tree::from_parts_unchecked(nodes, bag)
}
