//! Optimal leaf ordering: among the `2^(M-1)` orders obtainable by flipping
//! dendrogram children, find one minimizing the summed dissimilarity of
//! adjacent leaves. Dynamic program over (subtree, left end, right end),
//! `O(M^3)` time and `O(M^2)` memory.

use alloc::vec;
use alloc::vec::Vec;

use super::linkage::{leaf_order, Dendrogram};
use crate::dataset::ProximityMatrix;
use crate::error::{Error, Result};

/// Sum of `1 - P` over neighbouring positions of `order`.
pub fn adjacent_dissimilarity(p: &ProximityMatrix, order: &[usize]) -> f64 {
    order.windows(2).map(|w| 1.0 - p.get(w[0], w[1])).sum()
}

struct Layout<'a> {
    d: &'a Dendrogram,
    order: Vec<usize>,
    pos: Vec<usize>,
    /// Range `[start, end)` of each node's leaves within `order`.
    range: Vec<(usize, usize)>,
}

impl<'a> Layout<'a> {
    fn new(d: &'a Dendrogram) -> Self {
        let n = d.n_leaves();
        let order = leaf_order(d);
        let mut pos = vec![0; n];
        for (k, &leaf) in order.iter().enumerate() {
            pos[leaf] = k;
        }
        let mut range = vec![(0, 0); 2 * n - 1];
        for leaf in 0..n {
            range[leaf] = (pos[leaf], pos[leaf] + 1);
        }
        for (k, m) in d.merges().iter().enumerate() {
            let (a, b) = (range[m.left], range[m.right]);
            range[n + k] = (a.0.min(b.0), a.1.max(b.1));
        }
        Self {
            d,
            order,
            pos,
            range,
        }
    }

    fn leaves(&self, node: usize) -> &[usize] {
        let (s, e) = self.range[node];
        &self.order[s..e]
    }

    fn contains(&self, node: usize, leaf: usize) -> bool {
        let (s, e) = self.range[node];
        (s..e).contains(&self.pos[leaf])
    }

    /// Leaves that may sit at the inner end of `node` when `u` is at its
    /// outer end: the other child's leaves, or `u` itself for a leaf.
    fn inner(&self, node: usize, u: usize) -> &[usize] {
        match self.d.children(node) {
            None => self.leaves(node),
            Some((l, r)) => {
                if self.contains(l, u) {
                    self.leaves(r)
                } else {
                    self.leaves(l)
                }
            }
        }
    }
}

/// Leaf order of `d` with minimal adjacent dissimilarity under `p`.
pub fn optimal_leaf_order(d: &Dendrogram, p: &ProximityMatrix) -> Result<Vec<usize>> {
    let n = d.n_leaves();
    if p.len() != n {
        return Err(Error::FeatureMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if n <= 2 {
        return Ok(leaf_order(d));
    }
    let dist = |a: usize, b: usize| 1.0 - p.get(a, b);
    let lay = Layout::new(d);
    // cost[u * n + w]: best cost of the lowest common subtree of u and w laid
    // out from u to w.
    let mut cost = vec![0.0f64; n * n];
    let mut through = Vec::new();

    for merge in d.merges() {
        let (l, r) = (merge.left, merge.right);
        for &u in lay.leaves(l) {
            let inner_u = lay.inner(l, u);
            through.clear();
            through.extend(lay.leaves(r).iter().map(|&kk| {
                inner_u
                    .iter()
                    .map(|&m| cost[u * n + m] + dist(m, kk))
                    .fold(f64::INFINITY, f64::min)
            }));
            let r_start = lay.range[r].0;
            for &w in lay.leaves(r) {
                let best = lay
                    .inner(r, w)
                    .iter()
                    .map(|&kk| through[lay.pos[kk] - r_start] + cost[kk * n + w])
                    .fold(f64::INFINITY, f64::min);
                cost[u * n + w] = best;
                cost[w * n + u] = best;
            }
        }
    }

    let root = 2 * n - 2;
    let (rl, rr) = d.children(root).expect("root is internal");
    let mut best = (f64::INFINITY, 0, 0);
    for &u in lay.leaves(rl) {
        for &w in lay.leaves(rr) {
            if cost[u * n + w] < best.0 {
                best = (cost[u * n + w], u, w);
            }
        }
    }

    let mut out = Vec::with_capacity(n);
    let mut tasks = vec![(root, best.1, best.2)];
    while let Some((node, u, w)) = tasks.pop() {
        let Some((l, r)) = d.children(node) else {
            out.push(u);
            continue;
        };
        let (a, b) = if lay.contains(l, u) { (l, r) } else { (r, l) };
        let mut pick = (f64::INFINITY, u, w);
        for &m in lay.inner(a, u) {
            for &kk in lay.inner(b, w) {
                let c = cost[u * n + m] + dist(m, kk) + cost[kk * n + w];
                if c < pick.0 {
                    pick = (c, m, kk);
                }
            }
        }
        tasks.push((b, pick.2, w));
        tasks.push((a, u, pick.1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::linkage::{linkage, Linkage};
    use super::*;
    use alloc::string::ToString;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, seed: u64) -> ProximityMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v = vec![1.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.random_range(0.01..1.0);
                v[i * n + j] = x;
                v[j * n + i] = x;
            }
        }
        ProximityMatrix::new((0..n).map(|i| i.to_string()).collect(), v).unwrap()
    }

    /// Every order reachable by flipping children, by explicit enumeration.
    fn all_flip_orders(d: &Dendrogram, node: usize) -> Vec<Vec<usize>> {
        match d.children(node) {
            None => vec![vec![node]],
            Some((l, r)) => {
                let (ls, rs) = (all_flip_orders(d, l), all_flip_orders(d, r));
                let mut out = Vec::new();
                for a in &ls {
                    for b in &rs {
                        out.push(a.iter().chain(b).copied().collect());
                        out.push(b.iter().chain(a).copied().collect());
                    }
                }
                out
            }
        }
    }

    #[test]
    fn matches_exhaustive_search() {
        for n in 3..=7 {
            for seed in 0..6 {
                let p = random_matrix(n, seed * 31 + n as u64);
                let d = linkage(&p, Linkage::Average).unwrap();
                let best = all_flip_orders(&d, 2 * n - 2)
                    .iter()
                    .map(|o| adjacent_dissimilarity(&p, o))
                    .fold(f64::INFINITY, f64::min);
                let order = optimal_leaf_order(&d, &p).unwrap();
                let mut sorted = order.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                assert!(all_flip_orders(&d, 2 * n - 2).contains(&order));
                let got = adjacent_dissimilarity(&p, &order);
                assert!((got - best).abs() < 1e-12, "n={n} seed={seed}: {got} vs {best}");
            }
        }
    }

    #[test]
    fn never_worse_than_plain_order() {
        let p = random_matrix(40, 5);
        let d = linkage(&p, Linkage::Average).unwrap();
        let plain = adjacent_dissimilarity(&p, &leaf_order(&d));
        let olo = adjacent_dissimilarity(&p, &optimal_leaf_order(&d, &p).unwrap());
        assert!(olo <= plain + 1e-12);
    }
}
