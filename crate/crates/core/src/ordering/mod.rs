//! Seriation of a proximity matrix and cluster selection over the seriated order.

mod heatmap;
mod linkage;
mod olo;
mod ranges;

pub use heatmap::{colormap, heatmap_ppm, VIRIDIS};
pub use linkage::{leaf_order, linkage, Dendrogram, Linkage, Merge};
pub use olo::{adjacent_dissimilarity, optimal_leaf_order};
pub use ranges::{
    apply_cluster_ranges, block_mean_similarity, invert_permutation, ranges_from_clusters, reorder,
    validate_permutation, ClusterRange, ClusterRanges,
};

use alloc::vec::Vec;

use crate::dataset::ProximityMatrix;
use crate::error::Result;

/// Dendrogram and seriation permutation for `p`.
pub fn seriate(p: &ProximityMatrix, method: Linkage, optimal: bool) -> Result<(Dendrogram, Vec<usize>)> {
    let d = linkage(p, method)?;
    let order = if optimal {
        optimal_leaf_order(&d, p)?
    } else {
        leaf_order(&d)
    };
    Ok((d, order))
}
