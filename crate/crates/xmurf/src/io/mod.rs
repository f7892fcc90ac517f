//! On-disk formats.

mod dataset;
mod forest;
mod matrix;
mod model;
mod ordering;
mod trace;


pub use dataset::{
    load_dataset, load_labeled, load_table, read_dataset, save_dataset, save_labeled,
    write_dataset,
};
pub use forest::{forest_from_json, forest_to_json, load_forest, save_forest};
pub use matrix::{load_matrix, save_matrix, sidecar_path, MatrixFormat};
pub use model::{load_model, save_model, save_predictions, Model};
pub use ordering::{
    load_permutation, load_ranges, save_dendrogram, save_permutation, save_ranges, Permutation,
};
pub use trace::{load_trace, meta_path, save_trace};

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_slice(&read_bytes(path)?).map_err(|e| Error::input(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serialisable");
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

/// Shortest decimal text that parses back to the same `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
