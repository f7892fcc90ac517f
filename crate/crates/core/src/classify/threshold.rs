use alloc::{collections::BTreeMap, format, string::String, vec, vec::Vec};

use serde::{Deserialize, Serialize};

use super::SupervisedForest;
use crate::dataset::{Dataset, LabeledDataset};
use crate::error::{Error, Result};

/// Per-class confidence thresholds from out-of-bag votes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassThresholds {
    /// Mean out-of-bag vote share for the true class, per label.
    pub kappa_bar: BTreeMap<String, f64>,
    /// Out-of-bag vote share for the true class per datapoint; `None` when
    /// the datapoint is in every tree's bag.
    pub kappas: Vec<Option<f64>>,
}

impl ClassThresholds {
    /// Indices of datapoints without any out-of-bag tree.
    pub fn excluded(&self) -> Vec<usize> {
        (0..self.kappas.len()).filter(|&i| self.kappas[i].is_none()).collect()
    }
}

/// Out-of-bag thresholds of `f` on its training data `d`. A tree votes on
/// datapoint `i` iff `i` is absent from its bag.
pub fn oob_thresholds(f: &SupervisedForest, d: &LabeledDataset) -> Result<ClassThresholds> {
    if d.base().n_features() != f.n_features() {
        return Err(Error::FeatureMismatch {
            expected: f.n_features(),
            found: d.base().n_features(),
        });
    }
    let m = d.len();
    let mut in_bag = vec![vec![false; m]; f.trees().len()];
    for (b, t) in f.trees().iter().enumerate() {
        for &i in t.bag() {
            if i >= m {
                return Err(Error::Classify(format!(
                    "tree {b} bag refers to row {i} of a {m}-row dataset"
                )));
            }
            in_bag[b][i] = true;
        }
    }
    let kappas: Vec<Option<f64>> = crate::par::map_indices(m, |i| {
        let x = d.base().row(i);
        let truth = f.labels().binary_search(&d.labels()[i]).ok();
        let (mut oob, mut correct) = (0usize, 0usize);
        for (b, t) in f.trees().iter().enumerate() {
            if !in_bag[b][i] {
                oob += 1;
                if Some(t.predict(x)) == truth {
                    correct += 1;
                }
            }
        }
        (oob > 0).then(|| correct as f64 / oob as f64)
    });

    let excluded = kappas.iter().filter(|k| k.is_none()).count();
    if excluded > 0 {
        log::warn!("{excluded} datapoint(s) are in every bag and are left out of the class thresholds");
    }
    let mut kappa_bar = BTreeMap::new();
    for label in d.label_set() {
        let ks: Vec<f64> = (0..m)
            .filter(|&i| d.labels()[i] == label)
            .filter_map(|i| kappas[i])
            .collect();
        if ks.is_empty() {
            return Err(Error::Classify(format!(
                "class {label:?} has no out-of-bag datapoint"
            )));
        }
        kappa_bar.insert(label, ks.iter().sum::<f64>() / ks.len() as f64);
    }
    Ok(ClassThresholds { kappa_bar, kappas })
}

/// Outcome of thresholded classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Plurality label; kept even when the assignment is withdrawn.
    pub plurality: String,
    pub vote_fraction: f64,
    /// `ratio * kappa_bar` of the plurality class.
    pub threshold: f64,
    pub assigned: bool,
}

impl Prediction {
    pub fn label(&self) -> Option<&str> {
        self.assigned.then_some(self.plurality.as_str())
    }
}

/// Plurality vote over all trees, withdrawn when its vote fraction falls
/// below `ratio` times the class threshold.
pub fn predict_with_threshold(
    f: &SupervisedForest,
    th: &ClassThresholds,
    x: &[f64],
    ratio: f64,
) -> Result<Prediction> {
    if !(ratio >= 0.0) {
        return Err(Error::Config(format!("ratio {ratio} must be non-negative")));
    }
    f.check_input(x)?;
    let (c, vote_fraction) = f.plurality(x);
    let label = &f.labels()[c];
    let kappa = th
        .kappa_bar
        .get(label)
        .ok_or_else(|| Error::Classify(format!("no threshold for class {label:?}")))?;
    let threshold = ratio * kappa;
    Ok(Prediction {
        plurality: label.clone(),
        vote_fraction,
        threshold,
        assigned: vote_fraction >= threshold,
    })
}

/// Predictions for every row, in row order.
pub fn predict_all(
    f: &SupervisedForest,
    th: &ClassThresholds,
    data: &Dataset,
    ratio: f64,
) -> Result<Vec<Prediction>> {
    crate::par::map_indices(data.len(), |i| predict_with_threshold(f, th, data.row(i), ratio))
        .into_iter()
        .collect()
}

/// Fraction of rows that keep their assignment at `ratio`.
pub fn assignment_rate(
    f: &SupervisedForest,
    th: &ClassThresholds,
    data: &Dataset,
    ratio: f64,
) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let p = predict_all(f, th, data, ratio)?;
    Ok(p.iter().filter(|p| p.assigned).count() as f64 / p.len() as f64)
}
