//! Classifier model JSON and predictions CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xmurf_core::classify::{ClassNode, ClassThresholds, ClassTree, Prediction, SupervisedForest};

use super::forest::SplitFields;
use super::{fmt_f64, read_json, write_bytes};
use crate::error::{Error, Result};

/// A trained classifier with its out-of-bag thresholds and training schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub forest: SupervisedForest,
    pub thresholds: ClassThresholds,
    pub feature_names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    id: usize,
    #[serde(flatten)]
    split: SplitFields,
    class_counts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    nodes: Vec<NodeFile>,
    bag: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    seed: u64,
    #[serde(rename = "B")]
    n_trees: usize,
    #[serde(rename = "Q")]
    n_features: usize,
    feature_names: Vec<String>,
    labels: Vec<String>,
    thresholds: ClassThresholds,
    trees: Vec<TreeFile>,
}

pub fn save_model(m: &Model, path: &Path) -> Result<()> {
    let f = &m.forest;
    let file = ModelFile {
        seed: f.seed(),
        n_trees: f.trees().len(),
        n_features: f.n_features(),
        feature_names: m.feature_names.clone(),
        labels: f.labels().to_vec(),
        thresholds: m.thresholds.clone(),
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
                        class_counts: n.class_counts.clone(),
                    })
                    .collect(),
                bag: t.bag().to_vec(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec(&file).expect("serialisable");
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn load_model(path: &Path) -> Result<Model> {
    let file: ModelFile = read_json(path)?;
    let bad = |m: String| Error::input(path, m);
    if file.trees.len() != file.n_trees {
        return Err(bad(format!("B = {} but {} trees present", file.n_trees, file.trees.len())));
    }
    if file.feature_names.len() != file.n_features {
        return Err(bad(format!("Q = {} but {} feature names", file.n_features, file.feature_names.len())));
    }
    let k = file.labels.len();
    let mut trees = Vec::with_capacity(file.trees.len());
    for (b, t) in file.trees.into_iter().enumerate() {
        let mut nodes = Vec::with_capacity(t.nodes.len());
        for n in t.nodes {
            nodes.push(ClassNode {
                id: n.id,
                split: n.split.to_split(n.id).map_err(|e| bad(format!("tree {b}: {e}")))?,
                class_counts: n.class_counts,
            });
        }
        trees.push(ClassTree::from_parts(nodes, t.bag, k).map_err(|e| bad(format!("tree {b}: {e}")))?);
    }
    let forest = SupervisedForest::from_parts(trees, file.labels, file.n_features, file.seed)
        .map_err(|e| bad(e.to_string()))?;
    if let Some(l) = forest.labels().iter().find(|l| !file.thresholds.kappa_bar.contains_key(*l)) {
        return Err(bad(format!("no threshold for class {l:?}")));
    }
    Ok(Model {
        forest,
        thresholds: file.thresholds,
        feature_names: file.feature_names,
    })
}

/// Sentinel written in place of a withdrawn label.
pub const UNASSIGNED: &str = "UNASSIGNED";

pub fn save_predictions(ids: &[String], predictions: &[Prediction], path: &Path) -> Result<()> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| Error::input(path, e);
    wr.write_record(["id", "label", "vote_fraction", "threshold_used"]).map_err(err)?;
    for (id, p) in ids.iter().zip(predictions) {
        wr.write_record([
            id.as_str(),
            p.label().unwrap_or(UNASSIGNED),
            &fmt_f64(p.vote_fraction),
            &fmt_f64(p.threshold),
        ])
        .map_err(err)?;
    }
    write_bytes(path, &wr.into_inner().expect("in-memory"))
}
