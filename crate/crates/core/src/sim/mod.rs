//! Seeded microscopic simulation of a straight two- or three-lane highway.
//!
//! Longitudinal control follows Gompertz-shaped acceleration profiles with a
//! constant-deceleration braking term; lateral motion is a kinematic one-track
//! model steered by a look-ahead P-controller. Lane changes are motivated at
//! random and gated by risk- and patience-dependent gap acceptance.

mod engine;
mod lane_change;
mod lateral;
mod longitudinal;
mod trace;

pub use engine::{init_scene, run_simulation, Simulation};
pub use lane_change::{accepted_gap, LaneChangeParams, LaneDecision};
pub use lateral::{lateral_control, lookahead_time, max_steering, one_track_step, StepOutcome};
pub use longitudinal::{
    follower_accel, follower_brake, gompertz, gompertz_follower_accel, gompertz_leader_accel,
};
pub use trace::{Collision, IndexArray, LaneEvent, LaneEventKind, Trace, TraceParts, VehicleId};

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;
pub const WHEELBASE: f64 = 2.7;
pub const VEHICLE_LENGTH: f64 = 4.5;
pub const VEHICLE_WIDTH: f64 = 1.8;

/// Highway layout. Lane 1 is the rightmost; lane centres lie at
/// `(lane - 0.5) * lane_width`, with `y` growing to the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoadConfig {
    pub lanes: u8,
    pub lane_width: f64,
    /// Upper bound on vehicles per lane, at placement and at every instant.
    pub vehicles_per_lane: usize,
    pub speed_limit: f64,
    /// A lane leader further than this behind the front of the traffic
    /// accelerates on the gap instead of tracking its target speed.
    pub max_leader_gap: f64,
}

impl Default for RoadConfig {
    fn default() -> Self {
        Self {
            lanes: 3,
            lane_width: 3.5,
            vehicles_per_lane: 4,
            speed_limit: 33.3,
            max_leader_gap: 150.0,
        }
    }
}

impl RoadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.lanes) {
            return Err(Error::Config(format!("lane count {} not in {{2, 3}}", self.lanes)));
        }
        if self.vehicles_per_lane < 2 {
            return Err(Error::Config(format!(
                "vehicles per lane {} must be at least 2",
                self.vehicles_per_lane
            )));
        }
        if !(self.max_leader_gap > 0.0) {
            return Err(Error::Config("max leader gap must be positive".into()));
        }
        if !(self.lane_width > VEHICLE_WIDTH) {
            return Err(Error::Config(format!(
                "lane width {} must exceed the vehicle width {VEHICLE_WIDTH}",
                self.lane_width
            )));
        }
        if !(self.speed_limit >= 5.0) {
            return Err(Error::Config("speed limit must be at least 5 m/s".into()));
        }
        Ok(())
    }

    /// Admissible vehicle counts `n_l + 1 ..= n_l * n_vpl`.
    pub fn vehicle_bounds(&self) -> (usize, usize) {
        let lanes = self.lanes as usize;
        (lanes + 1, lanes * self.vehicles_per_lane)
    }

    pub fn lane_center(&self, lane: u8) -> f64 {
        (lane as f64 - 0.5) * self.lane_width
    }
}

/// Per-vehicle ability and temperament, drawn once per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    /// Gompertz amplitude: maximum acceleration, m/s^2.
    pub max_accel: f64,
    /// Maximum braking magnitude, m/s^2.
    pub max_decel: f64,
    pub gompertz_b: f64,
    pub gompertz_c: f64,
    pub risk: f64,
    pub patience: f64,
    pub politeness: f64,
    /// Perception delay, s.
    pub reaction_time: f64,
    pub target_speed: f64,
    /// Spontaneous lane-change motivations per second.
    pub lane_change_rate: f64,
}

impl BehaviorProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_accel > 0.0
            && self.max_decel > 0.0
            && self.gompertz_b > 0.0
            && self.gompertz_c > 0.0
            && self.reaction_time >= 0.0
            && self.target_speed >= 0.0
            && (0.0..=1.0).contains(&self.risk)
            && (0.0..=1.0).contains(&self.patience)
            && (0.0..=1.0).contains(&self.politeness);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid behaviour profile {self:?}")))
        }
    }
}

/// Pose and motion of one vehicle at one timestep. `a` and `delta` are the
/// commands applied over the following step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub a: f64,
    pub psi: f64,
    pub delta: f64,
    pub lane: u8,
}

/// Run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    /// Fixes the vehicle count instead of drawing it; must lie within the road's bounds.
    pub vehicles: Option<usize>,
    /// Mean interval between target-speed redraws, s. `None` keeps targets fixed.
    pub retarget_interval: Option<f64>,
    pub lane_changes: bool,
    /// Time after a collision until both vehicles leave the road, s. `None`
    /// leaves them standing for the rest of the run.
    pub wreck_clearance: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            duration: 60.0,
            seed: 0,
            vehicles: None,
            retarget_interval: Some(30.0),
            lane_changes: true,
            wreck_clearance: Some(30.0),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::Config(format!("dt {} not in (0, 0.1]", self.dt)));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Config("duration must be positive".into()));
        }
        if let Some(t) = self.retarget_interval {
            if !(t > 0.0) {
                return Err(Error::Config("retarget interval must be positive".into()));
            }
        }
        if let Some(t) = self.wreck_clearance {
            if !(t >= 0.0) {
                return Err(Error::Config("wreck clearance must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Number of recorded snapshots, `round(duration / dt)`.
    pub fn n_steps(&self) -> usize {
        (libm::round(self.duration / self.dt) as usize).max(1)
    }
}
