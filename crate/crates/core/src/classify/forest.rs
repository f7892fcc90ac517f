use alloc::{format, string::String, vec, vec::Vec};
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};
use crate::split::{candidate_thresholds, validate_tree, walk, Split};
use crate::xmurf::features_per_split;

/// A node of a classification tree with the class counts of the bootstrap
/// samples that reached it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassNode {
    pub id: usize,
    pub split: Option<Split>,
    pub class_counts: Vec<usize>,
}

impl ClassNode {
    /// Majority class, lowest index on ties.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (c, &n) in self.class_counts.iter().enumerate() {
            if n > self.class_counts[best] {
                best = c;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassTree {
    nodes: Vec<ClassNode>,
    bag: Vec<usize>,
}

impl ClassTree {
    pub fn from_parts(nodes: Vec<ClassNode>, bag: Vec<usize>, n_classes: usize) -> Result<Self> {
        validate_tree(nodes.len(), |i| (nodes[i].id, nodes[i].split))?;
        if let Some(n) = nodes.iter().find(|n| n.class_counts.len() != n_classes) {
            return Err(Error::Dataset(format!(
                "node {} has {} class counts, expected {n_classes}",
                n.id,
                n.class_counts.len()
            )));
        }
        Ok(Self { nodes, bag })
    }

    pub fn nodes(&self) -> &[ClassNode] {
        &self.nodes
    }

    /// Bootstrap sample indices, with repetition.
    pub fn bag(&self) -> &[usize] {
        &self.bag
    }

    pub fn leaf(&self, x: &[f64]) -> &ClassNode {
        let mut last = 0;
        walk(|i| self.nodes[i].split, x, |i| last = i);
        &self.nodes[last]
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        self.leaf(x).majority()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedForest {
    trees: Vec<ClassTree>,
    labels: Vec<String>,
    n_features: usize,
    seed: u64,
}

impl SupervisedForest {
    pub fn from_parts(
        trees: Vec<ClassTree>,
        labels: Vec<String>,
        n_features: usize,
        seed: u64,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Classify("forest has no trees".into()));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Classify("labels must be sorted and distinct".into()));
        }
        for (b, t) in trees.iter().enumerate() {
            ClassTree::from_parts(t.nodes.clone(), t.bag.clone(), labels.len())
                .map_err(|e| Error::Classify(format!("tree {b}: {e}")))?;
            if let Some(n) = t.nodes.iter().find(|n| n.split.is_some_and(|s| s.feature >= n_features)) {
                return Err(Error::Classify(format!("tree {b} node {} splits on unknown feature", n.id)));
            }
        }
        Ok(Self {
            trees,
            labels,
            n_features,
            seed,
        })
    }

    pub fn trees(&self) -> &[ClassTree] {
        &self.trees
    }

    /// Class labels in sorted order; class indices refer to this list.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.n_features {
            Ok(())
        } else {
            Err(Error::FeatureMismatch {
                expected: self.n_features,
                found: x.len(),
            })
        }
    }

    /// Tree votes per class.
    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let mut v = vec![0usize; self.labels.len()];
        for t in &self.trees {
            v[t.predict(x)] += 1;
        }
        v
    }

    /// Plurality class over all trees, lowest label on ties, with its vote fraction.
    pub fn plurality(&self, x: &[f64]) -> (usize, f64) {
        let v = self.votes(x);
        let mut best = 0;
        for c in 1..v.len() {
            if v[c] > v[best] {
                best = c;
            }
        }
        (best, v[best] as f64 / self.trees.len() as f64)
    }
}

/// Trains `n_trees` fully grown CART trees with Gini splits on bootstrap
/// bags; tree `b` draws from random stream `b` of `seed`.
pub fn fit_classifier(d: &LabeledDataset, n_trees: usize, seed: u64) -> Result<SupervisedForest> {
    if n_trees == 0 {
        return Err(Error::Config("classifier needs at least one tree".into()));
    }
    let labels = d.label_set();
    if labels.len() < 2 {
        return Err(Error::Classify(format!(
            "need at least two classes, found {}",
            labels.len()
        )));
    }
    let classes: Vec<usize> = d
        .labels()
        .iter()
        .map(|l| labels.binary_search(l).expect("label from set"))
        .collect();
    let mut sizes = vec![0usize; labels.len()];
    classes.iter().for_each(|&c| sizes[c] += 1);
    if let Some(c) = sizes.iter().position(|&s| s < 2) {
        return Err(Error::Classify(format!(
            "class {:?} has {} datapoint(s), need at least 2",
            labels[c], sizes[c]
        )));
    }
    let trees = crate::par::map_indices(n_trees, |b| {
        grow(d, &classes, labels.len(), &mut substream(seed, b as u64))
    });
    Ok(SupervisedForest {
        trees,
        labels,
        n_features: d.base().n_features(),
        seed,
    })
}

/// Child purity score `sum(cL^2)/nL + sum(cR^2)/nR` as an exact fraction.
/// Maximising it minimises the weighted Gini impurity of the children.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(sq_left: u64, n_left: u64, sq_right: u64, n_right: u64) -> Self {
        Self {
            num: sq_left as u128 * n_right as u128 + sq_right as u128 * n_left as u128,
            den: n_left as u128 * n_right as u128,
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

fn sum_sq(counts: &[usize]) -> u64 {
    counts.iter().map(|&c| (c * c) as u64).sum()
}

fn grow(d: &LabeledDataset, classes: &[usize], k: usize, rng: &mut StreamRng) -> ClassTree {
    let data = d.base();
    let m = data.len();
    let q = data.n_features();
    let q_split = features_per_split(q);
    let bag: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();

    let count = |rows: &[usize]| {
        let mut c = vec![0usize; k];
        rows.iter().for_each(|&r| c[classes[r]] += 1);
        c
    };
    let mut nodes = vec![ClassNode {
        id: 0,
        split: None,
        class_counts: count(&bag),
    }];
    let mut pending: Vec<(usize, Vec<usize>)> = vec![(0, bag.clone())];
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(m);
    let mut values: Vec<f64> = Vec::with_capacity(m);

    while let Some((id, rows)) = pending.pop() {
        let total = &nodes[id].class_counts;
        if total.iter().filter(|&&c| c > 0).count() <= 1 {
            continue;
        }
        let total = total.clone();
        let mut sampled = rand::seq::index::sample(rng, q, q_split).into_vec();
        sampled.sort_unstable();

        let mut search = |features: &mut dyn Iterator<Item = usize>| {
            let mut best: Option<(Score, usize, f64)> = None;
            for f in features {
                sorted.clear();
                sorted.extend(rows.iter().map(|&r| (data.row(r)[f], classes[r])));
                sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                values.clear();
                values.extend(sorted.iter().map(|p| p.0));
                let mut left = vec![0usize; k];
                let mut taken = 0;
                for (tau, n_left) in candidate_thresholds(&values) {
                    while taken < n_left {
                        left[sorted[taken].1] += 1;
                        taken += 1;
                    }
                    let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                    let score = Score::new(
                        sum_sq(&left),
                        n_left as u64,
                        sum_sq(&right),
                        (rows.len() - n_left) as u64,
                    );
                    if best.is_none_or(|(s, _, _)| score.cmp(&s) == Ordering::Greater) {
                        best = Some((score, f, tau));
                    }
                }
            }
            best
        };
        let found = search(&mut sampled.iter().copied()).or_else(|| {
            // every sampled feature is constant here: try the others
            search(&mut (0..q).filter(|f| sampled.binary_search(f).is_err()))
        });
        let Some((_, feature, threshold)) = found else {
            continue;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| data.row(r)[feature] <= threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(ClassNode {
            id: left,
            split: None,
            class_counts: count(&left_rows),
        });
        nodes.push(ClassNode {
            id: right,
            split: None,
            class_counts: count(&right_rows),
        });
        nodes[id].split = Some(Split {
            feature,
            threshold,
            left,
            right,
        });
        pending.push((right, right_rows));
        pending.push((left, left_rows));
    }
    ClassTree { nodes, bag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use alloc::string::ToString;

    fn toy() -> LabeledDataset {
        let rows = vec![
            vec![0.0, 5.0],
            vec![1.0, 3.0],
            vec![2.0, 4.0],
            vec![10.0, 5.0],
            vec![11.0, 3.0],
            vec![12.0, 4.0],
        ];
        let labels = ["a", "a", "a", "b", "b", "b"].map(ToString::to_string).to_vec();
        LabeledDataset::new(Dataset::from_rows(rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn separable_toy_is_learned() {
        let d = toy();
        let f = fit_classifier(&d, 25, 3).unwrap();
        for i in 0..d.len() {
            let (c, _) = f.plurality(d.base().row(i));
            assert_eq!(f.labels()[c], d.labels()[i]);
        }
    }

    #[test]
    fn leaves_are_pure_or_inseparable() {
        let d = toy();
        let f = fit_classifier(&d, 10, 1).unwrap();
        for t in f.trees() {
            for n in t.nodes() {
                if let Some(s) = n.split {
                    let (l, r) = (&t.nodes()[s.left], &t.nodes()[s.right]);
                    for c in 0..2 {
                        assert_eq!(l.class_counts[c] + r.class_counts[c], n.class_counts[c]);
                    }
                } else {
                    assert_eq!(n.class_counts.iter().filter(|&&c| c > 0).count(), 1);
                }
            }
            assert_eq!(t.nodes()[0].class_counts.iter().sum::<usize>(), d.len());
        }
    }

    #[test]
    fn input_errors() {
        let d = toy();
        let one = LabeledDataset::new(d.base().clone(), vec!["a".to_string(); 6]).unwrap();
        assert!(matches!(fit_classifier(&one, 5, 0), Err(Error::Classify(_))));
        let mut labels = d.labels().to_vec();
        labels[5] = "c".into();
        let tiny = LabeledDataset::new(d.base().clone(), labels).unwrap();
        assert!(matches!(fit_classifier(&tiny, 5, 0), Err(Error::Classify(_))));
        assert!(fit_classifier(&d, 0, 0).is_err());
    }

    #[test]
    fn constant_sampled_features_fall_back() {
        // Feature 0 is constant; with Q = 2 one feature is sampled per node,
        // so some nodes only see the constant one and must fall back.
        let rows = (0..8).map(|i| vec![1.0, i as f64]).collect();
        let labels = (0..8).map(|i| if i < 4 { "x" } else { "y" }.to_string()).collect();
        let d = LabeledDataset::new(Dataset::from_rows(rows).unwrap(), labels).unwrap();
        let f = fit_classifier(&d, 20, 9).unwrap();
        for t in f.trees() {
            for n in t.nodes().iter().filter(|n| n.split.is_none()) {
                assert_eq!(n.class_counts.iter().filter(|&&c| c > 0).count(), 1);
            }
        }
    }

    #[test]
    fn score_orders_exactly() {
        // pure children beat mixed children
        let pure = Score::new(16, 4, 16, 4);
        let mixed = Score::new(10, 4, 10, 4);
        assert_eq!(pure.cmp(&mixed), Ordering::Greater);
        assert_eq!(Score::new(1, 1, 4, 2).cmp(&Score::new(2, 2, 2, 2)), Ordering::Greater);
    }
}
