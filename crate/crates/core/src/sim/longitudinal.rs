//! Gompertz-shaped longitudinal acceleration.

use super::{BehaviorProfile, RoadConfig};

/// Standstill gap the braking law aims for, m.
pub const MIN_GAP: f64 = 2.0;
const GAP_EPS: f64 = 0.1;

/// `a_m * exp(-b * exp(-c * u))`.
#[inline]
pub fn gompertz(u: f64, profile: &BehaviorProfile) -> f64 {
    profile.max_accel * libm::exp(-profile.gompertz_b * libm::exp(-profile.gompertz_c * u))
}

/// Free-flow component of the follower law on bumper gap `d_fl`.
pub fn gompertz_follower_accel(d_fl: f64, profile: &BehaviorProfile) -> f64 {
    gompertz(d_fl.max(0.0), profile)
}

/// Lane-leader acceleration. A leader more than `max_leader_gap` behind the
/// front of the traffic (`d_il`) accelerates on that gap; otherwise it tracks
/// its target speed with the Gompertz profile of the speed error, signed.
pub fn gompertz_leader_accel(
    v_l: f64,
    d_il: f64,
    profile: &BehaviorProfile,
    road: &RoadConfig,
) -> f64 {
    if d_il > road.max_leader_gap {
        gompertz(d_il, profile)
    } else {
        let err = profile.target_speed - v_l;
        if err == 0.0 {
            0.0
        } else {
            gompertz(err.abs(), profile).copysign(err)
        }
    }
}

/// Braking needed to cancel a closing speed `dv` before the gap shrinks to
/// [`MIN_GAP`]; never stronger than the vehicle's maximum deceleration.
pub fn follower_brake(dv: f64, d_fl: f64, profile: &BehaviorProfile) -> f64 {
    let closing = dv.max(0.0);
    let room = (d_fl - MIN_GAP).max(GAP_EPS);
    -(closing * closing / (2.0 * room)).min(profile.max_decel)
}

/// Complete follower command: the lesser of the gap-based and free-flow
/// accelerations plus the braking term, saturated to `[-max_decel, max_accel]`.
pub fn follower_accel(
    v_f: f64,
    v_l: f64,
    d_fl: f64,
    free: f64,
    profile: &BehaviorProfile,
) -> f64 {
    let a = gompertz_follower_accel(d_fl, profile).min(free) + follower_brake(v_f - v_l, d_fl, profile);
    a.clamp(-profile.max_decel, profile.max_accel)
}
