//! Kinematic one-track model and look-ahead lane-keeping controller.

use super::{VehicleState, GRAVITY, WHEELBASE};

pub const K_PSI: f64 = 1.0;
pub const MAX_STEER: f64 = 0.5;
/// Lateral acceleration up to which the kinematic model is trusted.
pub const LATERAL_VALIDITY: f64 = 0.4 * GRAVITY;

pub fn lookahead_time(v: f64) -> f64 {
    (0.5 + 0.05 * v).clamp(0.5, 2.0)
}

fn k_d(v: f64) -> f64 {
    0.4 / v.max(5.0)
}

pub fn max_steering() -> f64 {
    MAX_STEER
}

/// Lateral offset and heading after `t` seconds at constant speed and steering.
fn predict(state: &VehicleState, v: f64, delta: f64, t: f64) -> (f64, f64) {
    let omega = v * libm::tan(delta) / WHEELBASE;
    if libm::fabs(omega * t) < 1e-9 {
        return (state.y + v * t * libm::sin(state.psi), state.psi);
    }
    let psi_t = state.psi + omega * t;
    let y_t = state.y + v / omega * (libm::cos(state.psi) - libm::cos(psi_t));
    (y_t, psi_t)
}

fn p_control(state: &VehicleState, target_y: f64, v: f64, delta: f64) -> f64 {
    let (y_p, psi_p) = predict(state, v, delta, lookahead_time(v));
    k_d(v) * (target_y - y_p) + K_PSI * (0.0 - psi_p)
}

/// Steering command toward the lane centre `target_y` (lane heading 0).
///
/// The pose is predicted over the look-ahead horizon with the steering angle
/// that is being commanded, i.e. the command is the fixed point of the
/// P-controller. Predicting with the previous angle and then replacing it
/// outright forms a feedback loop with gain far above one at highway speed.
/// Errors are desired minus predicted, so a vehicle left of its target
/// (positive `y` error) receives negative, rightward steering.
pub fn lateral_control(state: &VehicleState, target_y: f64, v: f64) -> f64 {
    const PROBE: f64 = 1e-4;
    let c0 = p_control(state, target_y, v, 0.0);
    let slope = (p_control(state, target_y, v, PROBE) - c0) / PROBE;
    let delta = c0 / (1.0 - slope);
    delta.clamp(-MAX_STEER, MAX_STEER)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: VehicleState,
    /// Implied lateral acceleration exceeded the model's validity range.
    pub beyond_validity: bool,
}

/// One explicit Euler step of the kinematic bicycle with wheelbase [`WHEELBASE`].
pub fn one_track_step(state: &VehicleState, delta_cmd: f64, a_cmd: f64, dt: f64) -> StepOutcome {
    let v = state.v;
    let tan_d = libm::tan(delta_cmd);
    let next = VehicleState {
        x: state.x + v * libm::cos(state.psi) * dt,
        y: state.y + v * libm::sin(state.psi) * dt,
        psi: state.psi + v / WHEELBASE * tan_d * dt,
        v: (v + a_cmd * dt).max(0.0),
        a: a_cmd,
        delta: delta_cmd,
        lane: state.lane,
    };
    StepOutcome {
        state: next,
        beyond_validity: libm::fabs(v * v * tan_d / WHEELBASE) > LATERAL_VALIDITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(y: f64, psi: f64, v: f64) -> VehicleState {
        VehicleState {
            x: 0.0,
            y,
            v,
            a: 0.0,
            psi,
            delta: 0.0,
            lane: 1,
        }
    }

    #[test]
    fn centred_vehicle_gets_no_steering() {
        assert_eq!(lateral_control(&at(1.75, 0.0, 20.0), 1.75, 20.0), 0.0);
    }

    #[test]
    fn left_of_target_steers_right_linearly() {
        let s1 = lateral_control(&at(2.0, 0.0, 20.0), 1.75, 20.0);
        let s2 = lateral_control(&at(2.25, 0.0, 20.0), 1.75, 20.0);
        assert!(s1 < 0.0);
        assert!((s2 - 2.0 * s1).abs() < 1e-12 * s1.abs().max(1.0), "{s1} {s2}");
        assert!(lateral_control(&at(1.0, 0.0, 20.0), 1.75, 20.0) > 0.0);
    }

    #[test]
    fn straight_and_standstill_steps() {
        let s = at(0.0, 0.0, 20.0);
        let next = one_track_step(&s, 0.0, 0.0, 0.1).state;
        assert_eq!((next.x, next.y, next.psi), (2.0, 0.0, 0.0));

        let still = VehicleState { x: 3.0, y: 1.0, psi: 0.2, ..at(1.0, 0.2, 0.0) };
        let next = one_track_step(&still, 0.3, 0.0, 0.1).state;
        assert_eq!((next.x, next.y, next.psi), (3.0, 1.0, 0.2));
    }

    #[test]
    fn circle_radius_matches_geometry() {
        // Constant steering traces a circle of radius L / tan(delta).
        let delta = 0.1;
        let radius = WHEELBASE / libm::tan(delta);
        let dt = 0.001;
        let mut s = at(0.0, 0.0, 10.0);
        let mut max_err: f64 = 0.0;
        while s.psi < core::f64::consts::FRAC_PI_2 {
            s = one_track_step(&s, delta, 0.0, dt).state;
            // centre of the circle at (0, radius)
            let r = libm::hypot(s.x, s.y - radius);
            max_err = max_err.max(libm::fabs(r - radius) / radius);
        }
        assert!(max_err < 0.01, "{max_err}");
    }

    #[test]
    fn validity_flag() {
        let s = at(0.0, 0.0, 30.0);
        assert!(one_track_step(&s, 0.2, 0.0, 0.05).beyond_validity);
        assert!(!one_track_step(&s, 0.005, 0.0, 0.05).beyond_validity);
    }

    #[test]
    fn lane_change_settles_without_overshoot_blowup() {
        for &v in &[5.0, 15.0, 25.0, 33.0] {
            let mut s = at(1.75, 0.0, v);
            let target = 5.25;
            let dt = 0.05;
            let mut max_y: f64 = 0.0;
            for _ in 0..(30.0 / dt) as usize {
                let d = lateral_control(&s, target, v);
                s = one_track_step(&s, d, 0.0, dt).state;
                max_y = max_y.max(s.y);
            }
            assert!((s.y - target).abs() < 0.05, "v={v}: y={}", s.y);
            assert!(s.psi.abs() < 1e-3);
            assert!(max_y < target + 0.5, "v={v}: overshoot to {max_y}");
        }
    }
}
