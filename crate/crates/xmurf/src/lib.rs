//! File formats, pipeline steps and configuration around `xmurf-core`.
//!
//! Pipeline: `simulate` writes traces, `extract` turns them into a scenario
//! table, `cluster` fits the unsupervised forest and its proximity matrix,
//! `order` seriates the matrix, `label` applies cluster ranges, `train` fits
//! the thresholded classifier and `classify` applies it.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use xmurf_core;
