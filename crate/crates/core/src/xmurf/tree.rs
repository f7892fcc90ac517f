use alloc::vec;
use alloc::vec::Vec;

use super::noise::NoiseKind;
use crate::error::Result;
use crate::split::{validate_tree, walk, Split};

/// One node of an unsupervised tree. Leaves carry no split.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: usize,
    pub split: Option<Split>,
    /// Bagged datapoints (with bootstrap multiplicity) that reached this node.
    pub real_count: usize,
    /// Noise distribution drawn for this node; `None` if the node was never
    /// considered for splitting.
    pub noise_kind: Option<NoiseKind>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// A binary tree rooted at node 0, with node ids equal to their index.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    bag: Vec<usize>,
}

impl Tree {
    /// Validates that `nodes` form a connected binary tree rooted at id 0.
    pub fn from_parts(nodes: Vec<TreeNode>, bag: Vec<usize>) -> Result<Self> {
        validate_tree(nodes.len(), |i| (nodes[i].id, nodes[i].split))?;
        Ok(Self { nodes, bag })
    }

    pub(crate) fn from_parts_unchecked(nodes: Vec<TreeNode>, bag: Vec<usize>) -> Self {
        Self { nodes, bag }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Row indices drawn into this tree's bootstrap bag.
    pub fn bag(&self) -> &[usize] {
        &self.bag
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes visited by `x`, root first.
    pub fn path(&self, x: &[f64]) -> PathSet {
        let mut ids = Vec::new();
        self.walk(x, |id| ids.push(id));
        PathSet::from_chain(ids)
    }

    pub(crate) fn walk(&self, x: &[f64], visit: impl FnMut(usize)) {
        walk(|id| self.nodes[id].split, x, visit)
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for node in &self.nodes {
            if let Some(s) = node.split {
                let d = depth[node.id] + 1;
                depth[s.left] = d;
                depth[s.right] = d;
                max = max.max(d);
            }
        }
        max
    }
}


/// The set of node ids a datapoint passes through in one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    /// Sorted, unique.
    ids: Vec<usize>,
}

impl PathSet {
    fn from_chain(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        Self { ids }
    }

    /// Builds a set from arbitrary node ids; duplicates are dropped.
    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn intersection_len(&self, other: &PathSet) -> usize {
        let (mut a, mut b, mut n) = (0, 0, 0);
        while a < self.ids.len() && b < other.ids.len() {
            match self.ids[a].cmp(&other.ids[b]) {
                core::cmp::Ordering::Less => a += 1,
                core::cmp::Ordering::Greater => b += 1,
                core::cmp::Ordering::Equal => {
                    n += 1;
                    a += 1;
                    b += 1;
                }
            }
        }
        n
    }
}

/// Path set for `x` in `tree`.
pub fn path(x: &[f64], tree: &Tree) -> PathSet {
    tree.path(x)
}

/// Jaccard index of two path sets from the same tree.
pub fn path_proximity_tree(p1: &PathSet, p2: &PathSet) -> f64 {
    let shared = p1.intersection_len(p2);
    jaccard(shared, p1.len(), p2.len())
}

#[inline]
pub(crate) fn jaccard(shared: usize, len_a: usize, len_b: usize) -> f64 {
    shared as f64 / (len_a + len_b - shared) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(id: usize) -> TreeNode {
        TreeNode {
            id,
            split: None,
            real_count: 1,
            noise_kind: None,
        }
    }

    fn inner(id: usize, feature: usize, threshold: f64, left: usize, right: usize) -> TreeNode {
        TreeNode {
            id,
            split: Some(Split {
                feature,
                threshold,
                left,
                right,
            }),
            real_count: 2,
            noise_kind: Some(NoiseKind::Uniform),
        }
    }

    #[test]
    fn jaccard_examples() {
        // shared prefix of 2, lengths 3 and 4
        let a = PathSet::from_ids([0, 1, 2]);
        let b = PathSet::from_ids([0, 1, 3, 4]);
        assert_eq!(path_proximity_tree(&a, &b), 0.4);
        assert_eq!(path_proximity_tree(&a, &a), 1.0);
        let c = PathSet::from_ids([0, 1, 2, 3]);
        let d = PathSet::from_ids([0, 4, 5, 6, 7]);
        assert_eq!(path_proximity_tree(&c, &d), 0.125);
    }

    #[test]
    fn paths_follow_splits() {
        let single = Tree::from_parts(vec![leaf(0)], vec![0]).unwrap();
        assert_eq!(single.path(&[1.0]).ids(), &[0]);

        let stump = Tree::from_parts(vec![inner(0, 0, 0.5, 1, 2), leaf(1), leaf(2)], vec![]).unwrap();
        assert_eq!(stump.path(&[0.5]).ids(), &[0, 1]);
        assert_eq!(stump.path(&[0.6]).ids(), &[0, 2]);
        assert_eq!(stump.depth(), 1);
    }

    #[test]
    fn rejects_malformed_trees() {
        let orphan = Tree::from_parts(vec![leaf(0), leaf(1)], vec![]);
        assert!(orphan.is_err());
        let shared_child = Tree::from_parts(
            vec![inner(0, 0, 0.5, 1, 2), inner(1, 0, 0.2, 3, 2), leaf(2), leaf(3)],
            vec![],
        );
        assert!(shared_child.is_err());
        let wrong_id = Tree::from_parts(vec![leaf(3)], vec![]);
        assert!(wrong_id.is_err());
    }
}
