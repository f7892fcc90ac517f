//! Scenario clustering toolkit.
//!
//! * [`sim`]: seeded microscopic highway simulation.
//! * [`scenario`]: headway-triggered scenario detection and the 47-feature encoding.
//! * [`xmurf`]: unsupervised random forest with path proximity.
//! * [`ordering`]: hierarchical seriation, heatmaps and cluster ranges.
//! * [`classify`]: supervised forest with out-of-bag class thresholds.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled;
//! `parallel` spreads tree fitting and proximity computation over rayon.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dataset;
pub mod classify;
pub mod error;
mod par;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod split;
pub mod ordering;
pub mod xmurf;

pub use dataset::{Dataset, FeatureVector, LabeledDataset, ProximityMatrix};
pub use error::{Error, Result};
