//! Gap acceptance for spontaneous lane changes.

use serde::{Deserialize, Serialize};

/// Tunables of the lane-change state machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaneChangeParams {
    /// Smallest front gap any driver accepts, m.
    pub min_gap: f64,
    /// Extra gap demanded by a fully risk-averse driver before waiting, m.
    pub gap_span: f64,
    /// Decay time of the extra gap for an impatient driver, s.
    pub decay_base: f64,
    /// Additional decay time for a fully patient driver, s.
    pub decay_span: f64,
    /// A change in progress is aborted when a target-lane gap falls below this, m.
    pub abort_gap: f64,
    /// Waiting longer than this drops the motivation, s.
    pub max_wait: f64,
}

impl Default for LaneChangeParams {
    fn default() -> Self {
        Self {
            min_gap: 3.0,
            gap_span: 25.0,
            decay_base: 5.0,
            decay_span: 20.0,
            abort_gap: 2.0,
            max_wait: 15.0,
        }
    }
}

/// Front gap a driver accepts after waiting `waited` seconds. Decreases with
/// risk and with waiting time; patient drivers lower their demand more slowly.
pub fn accepted_gap(params: &LaneChangeParams, risk: f64, patience: f64, waited: f64) -> f64 {
    let tau = params.decay_base + patience * params.decay_span;
    params.min_gap + (1.0 - risk) * params.gap_span * libm::exp(-waited.max(0.0) / tau)
}

/// Outcome of one lane-change evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneDecision {
    Keep,
    Change { to: u8 },
    Abort { to: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LaneState {
    Idle,
    Waiting { target: u8, waited: f64 },
    Changing { from: u8, to: u8, aborting: bool },
}
