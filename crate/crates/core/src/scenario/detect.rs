use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{MERGE_GAP, THW_KEEP, THW_TRIGGER};
use crate::sim::{Trace, VehicleId, VEHICLE_LENGTH};

/// Time headway `d_rel / v_ego`; infinite when the ego is (nearly) stopped.
pub fn compute_thw(d_rel: f64, v_ego: f64) -> f64 {
    if v_ego < 0.1 {
        f64::INFINITY
    } else {
        d_rel.max(0.0) / v_ego
    }
}

/// Inclusive timestep range of a detected scenario within a headway series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

/// Scenario windows in one headway series.
///
/// Maximal runs with `thw <= THW_TRIGGER` are found first; runs separated by
/// fewer than `MERGE_GAP / dt` samples are merged; a merged window is kept if
/// its minimum reaches `THW_KEEP`. Samples inside a merge gap exceed the
/// trigger value, so the interior bound holds for each triggered run, not for
/// the bridging samples.
pub fn detect_in_series(thw: &[f64], dt: f64) -> Vec<Window> {
    let merge_steps = libm::round(MERGE_GAP / dt) as usize;
    let mut runs: Vec<Window> = Vec::new();
    let mut open: Option<usize> = None;
    for (t, &h) in thw.iter().enumerate() {
        match (open, h <= THW_TRIGGER) {
            (None, true) => open = Some(t),
            (Some(s), false) => {
                runs.push(Window { start: s, end: t - 1 });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push(Window {
            start: s,
            end: thw.len() - 1,
        });
    }

    let mut merged: Vec<Window> = Vec::with_capacity(runs.len());
    for r in runs {
        match merged.last_mut() {
            Some(last) if r.start - last.end - 1 < merge_steps => last.end = r.end,
            _ => merged.push(r),
        }
    }
    merged
        .into_iter()
        .filter(|w| thw[w.start..=w.end].iter().any(|&h| h <= THW_KEEP))
        .collect()
}

/// A kept scenario of one ego vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub ego: VehicleId,
    pub t_start: usize,
    pub t_end: usize,
    /// Headway at `t_start..=t_end`; infinite where no leader is present.
    pub thw_series: Vec<f64>,
    pub thw_min: f64,
    /// First timestep attaining `thw_min`.
    pub t_changepoint: usize,
}

impl Scenario {
    pub fn from_window(ego: VehicleId, w: Window, thw: &[f64]) -> Self {
        let series = thw[w.start..=w.end].to_vec();
        let (k, &min) = series
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .expect("window is non-empty");
        Self {
            ego,
            t_start: w.start,
            t_end: w.end,
            thw_min: min,
            t_changepoint: w.start + k,
            thw_series: series,
        }
    }

    pub fn len(&self) -> usize {
        self.t_end - self.t_start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Timesteps at which features are sampled: start, changepoint, end.
    pub fn instants(&self) -> [usize; 3] {
        [self.t_start, self.t_changepoint, self.t_end]
    }
}

/// Headway of `ego` to its same-lane leader at every timestep. Infinite when
/// there is no leader and after the ego's first collision.
pub fn thw_series(trace: &Trace, ego: VehicleId) -> Vec<f64> {
    let crash = trace
        .collisions()
        .iter()
        .filter(|c| c.a == ego || c.b == ego)
        .map(|c| c.t)
        .min()
        .unwrap_or(usize::MAX);
    (0..trace.n_steps())
        .map(|t| match trace.leader_of(t, ego) {
            Some(l) if t <= crash => {
                let me = trace.at(t)[ego];
                let gap = trace.at(t)[l].x - me.x - VEHICLE_LENGTH;
                compute_thw(gap, me.v)
            }
            _ => f64::INFINITY,
        })
        .collect()
}

/// All kept scenarios of a trace, every vehicle serving as ego, ordered by
/// ego then start time.
pub fn detect_scenarios(trace: &Trace) -> Vec<Scenario> {
    let mut out = Vec::new();
    for ego in 0..trace.n_vehicles() {
        let thw = thw_series(trace, ego);
        for w in detect_in_series(&thw, trace.dt()) {
            out.push(Scenario::from_window(ego, w, &thw));
        }
    }
    out
}
