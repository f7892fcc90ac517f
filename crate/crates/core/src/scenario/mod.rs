//! Time-headway triggered scenario detection and feature extraction.

mod detect;
mod dtw;
mod features;
mod zones;

pub use detect::{compute_thw, detect_in_series, detect_scenarios, thw_series, Scenario, Window};
pub use dtw::dtw_distance;
pub use features::{extract_all, extract_features, feature_names, N_FEATURES};
pub use zones::{assign_zones, zone_extent, Neighbor, Zone, ZoneOccupancy};

/// A scenario opens when the time headway drops to this value, s.
pub const THW_TRIGGER: f64 = 1.0;
/// A scenario is kept only if its minimum headway reaches this value, s.
pub const THW_KEEP: f64 = 0.8;
/// Scenarios of one ego separated by less than this are merged, s.
pub const MERGE_GAP: f64 = 1.0;
/// Desired following time used as the reference gap, s.
pub const DESIRED_HEADWAY: f64 = 1.8;
