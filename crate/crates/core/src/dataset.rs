//! Tabular data model shared by every stage of the pipeline.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One datapoint: an ordered list of finite feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(q) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!("non-finite value at feature {q}")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `M` scenarios with `Q` named features each, keyed by unique ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    ids: Vec<String>,
    feature_names: Vec<String>,
    rows: Vec<FeatureVector>,
}

impl Dataset {
    /// Validates and builds a dataset. `Q = 0` is rejected as an empty schema.
    pub fn new(ids: Vec<String>, feature_names: Vec<String>, rows: Vec<FeatureVector>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::Dataset("empty schema".into()));
        }
        if ids.len() != rows.len() {
            return Err(Error::Dataset(format!(
                "{} ids for {} rows",
                ids.len(),
                rows.len()
            )));
        }
        let q = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(Error::Dataset(format!(
                    "row {i} ({}) has {} values, expected {q}",
                    ids[i],
                    row.len()
                )));
            }
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!(
                    "row {i} ({}) column {} is not finite",
                    ids[i], feature_names[col]
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, id) in ids.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::Dataset(format!("duplicate id {id:?} at row {i}")));
            }
        }
        Ok(Self {
            ids,
            feature_names,
            rows,
        })
    }

    /// Builds a dataset from raw rows, naming ids `0..M` and features `f0..fQ`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let q = rows.first().map_or(0, Vec::len);
        let ids = (0..rows.len()).map(|i| format!("{i}")).collect();
        let names = (0..q).map(|j| format!("f{j}")).collect();
        let rows = rows.into_iter().map(FeatureVector).collect();
        Self::new(ids, names, rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Subset of rows in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.ids[i].clone()).collect(),
            self.feature_names.clone(),
            indices.iter().map(|&i| self.rows[i].clone()).collect(),
        )
    }
}

/// A dataset whose rows carry class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    base: Dataset,
    labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new(base: Dataset, labels: Vec<String>) -> Result<Self> {
        if labels.len() != base.len() {
            return Err(Error::Dataset(format!(
                "{} labels for {} rows",
                labels.len(),
                base.len()
            )));
        }
        Ok(Self { base, labels })
    }

    pub fn base(&self) -> &Dataset {
        &self.base
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Distinct labels in sorted order; this order is the tie-breaking order.
    pub fn label_set(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.labels.iter().collect();
        set.into_iter().cloned().collect()
    }
}

/// Symmetric `M x M` similarity matrix with unit diagonal and entries in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl ProximityMatrix {
    /// `values` is row-major with `ids.len()^2` entries.
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let m = ids.len();
        if values.len() != m * m {
            return Err(Error::Dataset(format!(
                "matrix has {} values, expected {}",
                values.len(),
                m * m
            )));
        }
        let p = Self { ids, values };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(ids: Vec<String>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), ids.len() * ids.len());
        Self { ids, values }
    }

    /// Checks symmetry, unit diagonal and range, reporting the first offending cell.
    pub fn validate(&self) -> Result<()> {
        let m = self.len();
        for i in 0..m {
            for j in 0..m {
                let v = self.get(i, j);
                if i == j {
                    if v != 1.0 {
                        return Err(Error::Matrix {
                            row: i,
                            col: j,
                            reason: "diagonal entry is not 1",
                        });
                    }
                    continue;
                }
                if !(v > 0.0 && v <= 1.0) {
                    return Err(Error::Matrix {
                        row: i,
                        col: j,
                        reason: "entry outside (0, 1]",
                    });
                }
                if v != self.get(j, i) {
                    return Err(Error::Matrix {
                        row: i,
                        col: j,
                        reason: "matrix is not symmetric",
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.len();
        &self.values[i * m..(i + 1) * m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn dataset_rejects_duplicates_and_nan() {
        let names = vec!["a".to_string()];
        let rows = vec![FeatureVector(vec![1.0]), FeatureVector(vec![2.0])];
        let dup = Dataset::new(vec!["x".into(), "x".into()], names.clone(), rows);
        assert!(matches!(dup, Err(Error::Dataset(m)) if m.contains("duplicate")));

        let rows = vec![FeatureVector(vec![f64::NAN])];
        let err = Dataset::new(ids(1), names, rows).unwrap_err();
        assert!(err.to_string().contains("column a"));
    }

    #[test]
    fn dataset_rejects_empty_schema() {
        let err = Dataset::new(ids(1), vec![], vec![FeatureVector(vec![])]).unwrap_err();
        assert!(err.to_string().contains("empty schema"));
    }

    #[test]
    fn matrix_validation_reports_cell() {
        let ok = ProximityMatrix::new(ids(2), vec![1.0, 0.4, 0.4, 1.0]);
        assert!(ok.is_ok());

        let asym = ProximityMatrix::new(ids(2), vec![1.0, 0.4, 0.5, 1.0]).unwrap_err();
        assert_eq!(
            asym,
            Error::Matrix {
                row: 0,
                col: 1,
                reason: "matrix is not symmetric"
            }
        );
        let diag = ProximityMatrix::new(ids(2), vec![1.0, 0.4, 0.4, 0.9]).unwrap_err();
        assert!(matches!(diag, Error::Matrix { row: 1, col: 1, .. }));
        let zero = ProximityMatrix::new(ids(2), vec![1.0, 0.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(zero, Error::Matrix { row: 0, col: 1, .. }));
    }
}
