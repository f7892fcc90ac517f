//! Unsupervised forest JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xmurf_core::split::Split;
use xmurf_core::xmurf::{Forest, NoiseKind, Tree, TreeNode};

use super::write_bytes;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
pub(crate) struct SplitFields {
    pub feature: Option<usize>,
    pub threshold: Option<f64>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl SplitFields {
    pub fn from_split(s: Option<Split>) -> Self {
        Self {
            feature: s.map(|s| s.feature),
            threshold: s.map(|s| s.threshold),
            left: s.map(|s| s.left),
            right: s.map(|s| s.right),
        }
    }

    pub fn to_split(&self, id: usize) -> Result<Option<Split>, String> {
        match (self.feature, self.threshold, self.left, self.right) {
            (Some(feature), Some(threshold), Some(left), Some(right)) => Ok(Some(Split {
                feature,
                threshold,
                left,
                right,
            })),
            (None, None, None, None) => Ok(None),
            _ => Err(format!("node {id} has a partial split")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    id: usize,
    #[serde(flatten)]
    split: SplitFields,
    real_count: usize,
    noise_kind: Option<NoiseKind>,
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    nodes: Vec<NodeFile>,
    bag: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ForestFile {
    seed: u64,
    #[serde(rename = "B")]
    n_trees: usize,
    #[serde(rename = "Q")]
    n_features: usize,
    feature_names: Vec<String>,
    trees: Vec<TreeFile>,
}

pub fn forest_to_json(f: &Forest) -> Vec<u8> {
    let file = ForestFile {
        seed: f.seed(),
        n_trees: f.n_trees(),
        n_features: f.n_features(),
        feature_names: f.feature_names().to_vec(),
        trees: f
            .trees()
            .iter()
            .map(|t| TreeFile {
                nodes: t
                    .nodes()
                    .iter()
                    .map(|n| NodeFile {
                        id: n.id,
                        split: SplitFields::from_split(n.split),
                        real_count: n.real_count,
                        noise_kind: n.noise_kind,
                    })
                    .collect(),
                bag: t.bag().to_vec(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec(&file).expect("serialisable");
    bytes.push(b'\n');
    bytes
}

pub fn forest_from_json(bytes: &[u8]) -> Result<Forest, String> {
    let file: ForestFile = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    if file.trees.len() != file.n_trees {
        return Err(format!("B = {} but {} trees present", file.n_trees, file.trees.len()));
    }
    if file.feature_names.len() != file.n_features {
        return Err(format!("Q = {} but {} feature names", file.n_features, file.feature_names.len()));
    }
    let mut trees = Vec::with_capacity(file.trees.len());
    for (b, t) in file.trees.into_iter().enumerate() {
        let nodes = t
            .nodes
            .into_iter()
            .map(|n| {
                Ok(TreeNode {
                    id: n.id,
                    split: n.split.to_split(n.id)?,
                    real_count: n.real_count,
                    noise_kind: n.noise_kind,
                })
            })
            .collect::<Result<Vec<_>, String>>()
            .map_err(|e| format!("tree {b}: {e}"))?;
        trees.push(Tree::from_parts(nodes, t.bag).map_err(|e| format!("tree {b}: {e}"))?);
    }
    Forest::from_parts(trees, file.n_features, file.seed, file.feature_names).map_err(|e| e.to_string())
}

pub fn save_forest(f: &Forest, path: &Path) -> Result<()> {
    write_bytes(path, &forest_to_json(f))
}

pub fn load_forest(path: &Path) -> Result<Forest> {
    forest_from_json(&super::read_bytes(path)?).map_err(|m| Error::input(path, m))
}

