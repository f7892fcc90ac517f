//! Supervised random forest with out-of-bag, class-adaptive confidence
//! thresholds.

mod forest;
mod threshold;

pub use forest::{fit_classifier, ClassNode, ClassTree, SupervisedForest};
pub use threshold::{
    assignment_rate, oob_thresholds, predict_all, predict_with_threshold, ClassThresholds,
    Prediction,
};
