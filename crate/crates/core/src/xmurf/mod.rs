//! Extended modified unsupervised random forest.
//!
//! Trees separate the real data from a virtual noise class whose per-child
//! counts are computed from a CDF drawn at every node, never sampled. The
//! similarity of two datapoints is the Jaccard index of their root-to-leaf
//! paths, averaged over the forest.

mod forest;
mod impurity;
mod noise;
mod proximity;
mod tree;

pub use forest::{features_per_split, fit, Forest};
pub use impurity::{gini, gini_gain};
pub use noise::{estimate_noise_children, noise_cdf, normal_cdf_approx, standardize, NoiseKind};
pub use proximity::{proximity_matrix, root_sharing_lower_bound};
pub use tree::{path, path_proximity_tree, PathSet, Tree, TreeNode};
