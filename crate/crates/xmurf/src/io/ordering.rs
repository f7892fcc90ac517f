//! Dendrogram, permutation and cluster-range JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xmurf_core::ordering::{validate_permutation, ClusterRanges, Dendrogram, Merge};

use super::{read_json, write_json};
use crate::error::{Error, Result};

#[derive(Serialize)]
struct DendrogramFile<'a> {
    n_leaves: usize,
    merges: &'a [Merge],
}

pub fn save_dendrogram(d: &Dendrogram, path: &Path) -> Result<()> {
    write_json(
        path,
        &DendrogramFile {
            n_leaves: d.n_leaves(),
            merges: d.merges(),
        },
    )
}

/// Seriation order: position `k` of the seriated matrix holds original row
/// `order[k]`, whose id is `ids[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    pub order: Vec<usize>,
    pub ids: Vec<String>,
}

pub fn save_permutation(p: &Permutation, path: &Path) -> Result<()> {
    write_json(path, p)
}

pub fn load_permutation(path: &Path) -> Result<Permutation> {
    let p: Permutation = read_json(path)?;
    validate_permutation(&p.order, p.order.len()).map_err(|e| Error::input(path, e))?;
    if p.ids.len() != p.order.len() {
        return Err(Error::input(path, "ids and order differ in length"));
    }
    Ok(p)
}

pub fn save_ranges(r: &ClusterRanges, path: &Path) -> Result<()> {
    write_json(path, r)
}

pub fn load_ranges(path: &Path) -> Result<ClusterRanges> {
    read_json(path)
}
