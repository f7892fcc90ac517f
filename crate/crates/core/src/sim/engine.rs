//! Scene initialisation and the stepping loop.

use alloc::{collections::BTreeSet, format, vec, vec::Vec};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::lane_change::LaneState;
use super::lateral::{lateral_control, one_track_step};
use super::longitudinal::{follower_accel, gompertz, gompertz_leader_accel};
use super::{
    accepted_gap, BehaviorProfile, Collision, LaneChangeParams, LaneDecision, LaneEvent,
    LaneEventKind, RoadConfig, SimConfig, Trace, TraceParts, VehicleState, GRAVITY, VEHICLE_LENGTH,
    VEHICLE_WIDTH,
};
use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};

const SCENE_STREAM: u64 = 0;
const DYNAMICS_STREAM: u64 = 1;
/// Minimum initial spacing between vehicle fronts in a lane.
const MIN_SPACING: f64 = 2.0 * VEHICLE_LENGTH;
const SETTLED_OFFSET: f64 = 0.1;
const SETTLED_HEADING: f64 = 0.01;

fn sample_target_speed(rng: &mut StreamRng, road: &RoadConfig) -> f64 {
    let d = Normal::new(0.55 * road.speed_limit, 0.12 * road.speed_limit).expect("finite");
    d.sample(rng).clamp(5.0, road.speed_limit)
}

fn sample_profile(rng: &mut StreamRng, road: &RoadConfig) -> BehaviorProfile {
    BehaviorProfile {
        max_accel: rng.random_range(1.5..4.0),
        max_decel: GRAVITY,
        gompertz_b: rng.random_range(2.0..6.0),
        gompertz_c: rng.random_range(0.03..0.15),
        risk: rng.random::<f64>(),
        patience: rng.random::<f64>(),
        politeness: rng.random::<f64>(),
        reaction_time: rng.random_range(0.3..1.2),
        target_speed: sample_target_speed(rng, road),
        lane_change_rate: rng.random_range(0.01..0.1),
    }
}

fn place(
    road: &RoadConfig,
    n_vehicles: Option<usize>,
    rng: &mut StreamRng,
) -> Result<(Vec<VehicleState>, Vec<BehaviorProfile>)> {
    road.validate()?;
    let (lo, hi) = road.vehicle_bounds();
    let need = road.vehicles_per_lane as f64 * MIN_SPACING;
    if need > road.max_leader_gap {
        return Err(Error::Config(format!(
            "{} vehicles per lane need {need} m, max leader gap is {} m",
            road.vehicles_per_lane, road.max_leader_gap
        )));
    }
    let n = match n_vehicles {
        Some(n) if (lo..=hi).contains(&n) => n,
        Some(n) if n >= 1 && n <= hi => n,
        Some(n) => {
            return Err(Error::Config(format!("vehicle count {n} outside 1..={hi}")));
        }
        None => rng.random_range(lo..=hi),
    };

    let lanes = road.lanes as usize;
    let mut per_lane = vec![0usize; lanes];
    let mut lane_of = Vec::with_capacity(n);
    for _ in 0..n {
        let open: Vec<usize> = (0..lanes)
            .filter(|&l| per_lane[l] < road.vehicles_per_lane)
            .collect();
        let l = open[rng.random_range(0..open.len())];
        per_lane[l] += 1;
        lane_of.push(l);
    }

    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(lanes);
    for &k in &per_lane {
        let slack = road.max_leader_gap - k as f64 * MIN_SPACING;
        let mut u: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * slack).collect();
        u.sort_by(f64::total_cmp);
        xs.push(u.iter().enumerate().map(|(j, &u)| u + j as f64 * MIN_SPACING).collect());
    }
    let mut next = vec![0usize; lanes];
    let mut states = Vec::with_capacity(n);
    let mut profiles = Vec::with_capacity(n);
    for &l in &lane_of {
        let profile = sample_profile(rng, road);
        let lane = (l + 1) as u8;
        states.push(VehicleState {
            x: xs[l][next[l]],
            y: road.lane_center(lane),
            v: profile.target_speed * rng.random_range(0.8..1.0),
            a: 0.0,
            psi: 0.0,
            delta: 0.0,
            lane,
        });
        next[l] += 1;
        profiles.push(profile);
    }
    Ok((states, profiles))
}

/// Initial vehicle states and behaviour profiles for `seed`. Identical to the
/// first snapshot of [`run_simulation`] with the same seed and a free vehicle count.
pub fn init_scene(
    road: &RoadConfig,
    seed: u64,
) -> Result<(Vec<VehicleState>, Vec<BehaviorProfile>)> {
    place(road, None, &mut substream(seed, SCENE_STREAM))
}

/// Runs a complete simulation.
pub fn run_simulation(road: &RoadConfig, config: &SimConfig) -> Result<Trace> {
    Simulation::new(*road, *config)?.run()
}

/// Stepping state of one run.
#[derive(Debug, Clone)]
pub struct Simulation {
    road: RoadConfig,
    config: SimConfig,
    params: LaneChangeParams,
    profiles: Vec<BehaviorProfile>,
    targets: Vec<f64>,
    history: Vec<Vec<VehicleState>>,
    lane_state: Vec<LaneState>,
    /// Lane each vehicle holds for the next step.
    claims: Vec<u8>,
    frozen: Vec<bool>,
    /// Step from which a wrecked vehicle is off the road.
    departures: Vec<Option<usize>>,
    retarget_at: Vec<f64>,
    collided: BTreeSet<(usize, usize)>,
    collisions: Vec<Collision>,
    events: Vec<LaneEvent>,
    rng: StreamRng,
    validity_warnings: usize,
}

impl Simulation {
    pub fn new(road: RoadConfig, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let (states, profiles) = place(&road, config.vehicles, &mut substream(config.seed, SCENE_STREAM))?;
        Self::from_scene(road, config, states, profiles)
    }

    /// Starts from a given scene. Useful for constructing specific situations.
    pub fn from_scene(
        road: RoadConfig,
        config: SimConfig,
        states: Vec<VehicleState>,
        profiles: Vec<BehaviorProfile>,
    ) -> Result<Self> {
        road.validate()?;
        config.validate()?;
        if states.len() != profiles.len() || states.is_empty() {
            return Err(Error::Config(format!(
                "{} states for {} profiles",
                states.len(),
                profiles.len()
            )));
        }
        for p in &profiles {
            p.validate()?;
        }
        let mut counts = vec![0usize; road.lanes as usize];
        for s in &states {
            if s.lane == 0 || s.lane > road.lanes {
                return Err(Error::Config(format!("lane {} out of range", s.lane)));
            }
            counts[s.lane as usize - 1] += 1;
        }
        if counts.iter().any(|&c| c > road.vehicles_per_lane) {
            return Err(Error::Config("initial lane occupancy exceeds capacity".into()));
        }
        let mut rng = substream(config.seed, DYNAMICS_STREAM);
        let n = states.len();
        let claims = states.iter().map(|s| s.lane).collect();
        let retarget_at = (0..n)
            .map(|_| match config.retarget_interval {
                Some(mean) => Exp::new(1.0 / mean).expect("positive rate").sample(&mut rng),
                None => f64::INFINITY,
            })
            .collect();
        Ok(Self {
            road,
            config,
            params: LaneChangeParams::default(),
            targets: profiles.iter().map(|p| p.target_speed).collect(),
            profiles,
            history: vec![states],
            lane_state: vec![LaneState::Idle; n],
            claims,
            frozen: vec![false; n],
            departures: vec![None; n],
            retarget_at,
            collided: BTreeSet::new(),
            collisions: Vec::new(),
            events: Vec::new(),
            rng,
            validity_warnings: 0,
        })
    }

    pub fn with_lane_change_params(mut self, params: LaneChangeParams) -> Self {
        self.params = params;
        self
    }

    pub fn current(&self) -> &[VehicleState] {
        self.history.last().expect("history is never empty")
    }

    pub fn step_index(&self) -> usize {
        self.history.len() - 1
    }

    pub fn profiles(&self) -> &[BehaviorProfile] {
        &self.profiles
    }

    /// Steps whose implied lateral acceleration left the kinematic model's validity range.
    pub fn validity_warnings(&self) -> usize {
        self.validity_warnings
    }

    /// Snapshot of the other vehicles as seen by `ego` after its reaction delay.
    fn perceived(&self, ego: usize) -> &[VehicleState] {
        let delay = libm::round(self.profiles[ego].reaction_time / self.config.dt) as usize;
        &self.history[self.step_index().saturating_sub(delay)]
    }

    fn on_road(&self, i: usize) -> bool {
        self.departures[i].is_none_or(|d| self.step_index() < d)
    }

    fn occupies(&self, s: &VehicleState, lane: u8) -> bool {
        s.lane == lane
            || libm::fabs(s.y - self.road.lane_center(lane))
                < 0.5 * (self.road.lane_width + VEHICLE_WIDTH)
    }

    /// Bumper gaps to the nearest vehicles ahead of and behind `ego` in `lane`,
    /// with the ahead vehicle's id.
    fn gaps(&self, ego: usize, lane: u8) -> (f64, Option<usize>, f64) {
        let me = self.current()[ego];
        let seen = self.perceived(ego);
        let (mut front, mut front_id, mut rear) = (f64::INFINITY, None, f64::INFINITY);
        for (j, s) in seen.iter().enumerate() {
            if j == ego || !self.on_road(j) || !self.occupies(s, lane) {
                continue;
            }
            if s.x >= me.x {
                let g = s.x - me.x - VEHICLE_LENGTH;
                if g < front {
                    front = g;
                    front_id = Some(j);
                }
            } else {
                rear = rear.min(me.x - s.x - VEHICLE_LENGTH);
            }
        }
        (front, front_id, rear)
    }

    fn reserved(&self, lane: u8) -> usize {
        (0..self.claims.len())
            .filter(|&i| self.on_road(i))
            .filter(|&i| {
                self.claims[i] == lane
                    || matches!(self.lane_state[i],
                        LaneState::Changing { from, aborting: false, .. } if from == lane)
            })
            .count()
    }

    fn event(&mut self, vehicle: usize, kind: LaneEventKind) {
        self.events.push(LaneEvent {
            t: self.step_index(),
            vehicle,
            kind,
        });
    }

    /// Advances the lane-change state machine of `ego` by one step and returns
    /// the resulting lane claim change. Draws from the run's random stream.
    pub fn lane_change_decision(&mut self, ego: usize) -> LaneDecision {
        let me = self.current()[ego];
        let profile = self.profiles[ego];
        let dt = self.config.dt;
        match self.lane_state[ego] {
            LaneState::Idle => {
                let u: f64 = self.rng.random();
                if !self.config.lane_changes || u >= profile.lane_change_rate * dt {
                    return LaneDecision::Keep;
                }
                let mut options = Vec::with_capacity(2);
                if me.lane > 1 {
                    options.push(me.lane - 1);
                }
                if me.lane < self.road.lanes {
                    options.push(me.lane + 1);
                }
                let target = options[self.rng.random_range(0..options.len())];
                self.event(ego, LaneEventKind::Motivated { target });
                self.lane_state[ego] = LaneState::Waiting { target, waited: 0.0 };
                LaneDecision::Keep
            }
            LaneState::Waiting { target, waited } => {
                let need = accepted_gap(&self.params, profile.risk, profile.patience, waited);
                let (front, _, rear) = self.gaps(ego, target);
                let room = self.reserved(target) < self.road.vehicles_per_lane;
                if room && front >= need && rear >= need * (0.5 + profile.politeness) {
                    self.event(ego, LaneEventKind::Start { from: me.lane, to: target });
                    self.lane_state[ego] = LaneState::Changing {
                        from: me.lane,
                        to: target,
                        aborting: false,
                    };
                    self.claims[ego] = target;
                    LaneDecision::Change { to: target }
                } else if waited + dt > self.params.max_wait {
                    self.event(ego, LaneEventKind::GiveUp { target });
                    self.lane_state[ego] = LaneState::Idle;
                    LaneDecision::Keep
                } else {
                    self.lane_state[ego] = LaneState::Waiting {
                        target,
                        waited: waited + dt,
                    };
                    LaneDecision::Keep
                }
            }
            LaneState::Changing { from, to, aborting } => {
                if libm::fabs(me.y - self.road.lane_center(to)) < SETTLED_OFFSET
                    && libm::fabs(me.psi) < SETTLED_HEADING
                {
                    self.event(ego, LaneEventKind::Complete { lane: to });
                    self.lane_state[ego] = LaneState::Idle;
                    return LaneDecision::Keep;
                }
                if aborting {
                    return LaneDecision::Keep;
                }
                let (front, _, rear) = self.gaps(ego, to);
                if front.min(rear) < self.params.abort_gap {
                    self.event(ego, LaneEventKind::Abort { from, to });
                    self.lane_state[ego] = LaneState::Changing {
                        from: to,
                        to: from,
                        aborting: true,
                    };
                    self.claims[ego] = from;
                    LaneDecision::Abort { to: from }
                } else {
                    LaneDecision::Keep
                }
            }
        }
    }

    fn longitudinal(&self, ego: usize) -> f64 {
        let me = self.current()[ego];
        let profile = &BehaviorProfile {
            target_speed: self.targets[ego],
            ..self.profiles[ego]
        };
        let mut leader: Option<(f64, f64)> = None;
        let mut lanes = [me.lane, me.lane];
        if let LaneState::Changing { from, .. } = self.lane_state[ego] {
            lanes[1] = from;
        }
        for lane in lanes {
            let (gap, id, _) = self.gaps(ego, lane);
            if let Some(j) = id {
                if leader.is_none_or(|(g, _)| gap < g) {
                    leader = Some((gap, self.perceived(ego)[j].v));
                }
            }
        }
        let regulate = |target: f64| {
            let err = target - me.v;
            if err == 0.0 {
                0.0
            } else {
                gompertz(err.abs(), profile).copysign(err)
            }
        };
        match leader {
            Some((gap, v_l)) => {
                let free = regulate(profile.target_speed);
                follower_accel(me.v, v_l, gap, free, profile)
            }
            None => {
                let front = self
                    .perceived(ego)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != ego && self.on_road(j))
                    .map(|(_, s)| s.x)
                    .fold(me.x, f64::max);
                let a = gompertz_leader_accel(me.v, front - me.x, profile, &self.road);
                a.min(regulate(self.road.speed_limit))
                    .clamp(-profile.max_decel, profile.max_accel)
            }
        }
    }

    /// Computes commands for the current snapshot and appends the next one.
    pub fn step(&mut self) {
        let n = self.profiles.len();
        let t = self.step_index();
        let now = t as f64 * self.config.dt;
        for i in 0..n {
            if self.frozen[i] {
                continue;
            }
            if now >= self.retarget_at[i] {
                let mean = self.config.retarget_interval.unwrap_or(f64::INFINITY);
                self.targets[i] = sample_target_speed(&mut self.rng, &self.road);
                let wait = Exp::new(1.0 / mean).expect("positive rate").sample(&mut self.rng);
                self.retarget_at[i] = now + wait;
            }
            self.lane_change_decision(i);
        }
        let lanes = self.claims.clone();

        let mut commands = Vec::with_capacity(n);
        for (i, &lane) in lanes.iter().enumerate() {
            if self.frozen[i] {
                commands.push((0.0, 0.0));
                continue;
            }
            let a = self.longitudinal(i);
            let me = self.current()[i];
            let delta = lateral_control(&me, self.road.lane_center(lane), me.v);
            commands.push((a, delta));
        }

        let dt = self.config.dt;
        let mut next = Vec::with_capacity(n);
        {
            let cur = self.history.last_mut().expect("non-empty");
            for i in 0..n {
                let (a, delta) = commands[i];
                cur[i].a = a;
                cur[i].delta = delta;
            }
        }
        let cur = self.current().to_vec();
        for i in 0..n {
            if self.frozen[i] {
                next.push(cur[i]);
                continue;
            }
            let (a, delta) = commands[i];
            let out = one_track_step(&cur[i], delta, a, dt);
            if out.beyond_validity {
                self.validity_warnings += 1;
            }
            let mut s = out.state;
            s.lane = lanes[i];
            next.push(s);
        }

        for i in 0..n {
            for j in i + 1..n {
                if self.collided.contains(&(i, j)) || !self.on_road(i) || !self.on_road(j) {
                    continue;
                }
                let overlap = libm::fabs(next[i].x - next[j].x) < VEHICLE_LENGTH
                    && libm::fabs(next[i].y - next[j].y) < VEHICLE_WIDTH;
                let swapped = cur[i].lane == cur[j].lane
                    && next[i].lane == cur[i].lane
                    && next[j].lane == cur[j].lane
                    && (cur[i].x - cur[j].x) * (next[i].x - next[j].x) < 0.0;
                if overlap || swapped {
                    self.collided.insert((i, j));
                    self.collisions.push(Collision { t: t + 1, a: i, b: j });
                    let clear = self
                        .config
                        .wreck_clearance
                        .map(|c| t + 1 + libm::round(c / self.config.dt) as usize);
                    for k in [i, j] {
                        if !self.frozen[k] {
                            self.frozen[k] = true;
                            self.departures[k] = clear;
                            next[k].v = 0.0;
                            next[k].a = 0.0;
                            next[k].delta = 0.0;
                        }
                    }
                }
            }
        }
        self.history.push(next);
    }

    pub fn run(mut self) -> Result<Trace> {
        let steps = self.config.n_steps();
        while self.history.len() < steps {
            self.step();
        }
        // the last snapshot carries no command
        if let Some(last) = self.history.last_mut() {
            for s in last.iter_mut() {
                s.a = 0.0;
                s.delta = 0.0;
            }
        }
        if self.validity_warnings > 0 {
            log::warn!(
                "{} vehicle-steps exceeded the kinematic model's lateral acceleration range",
                self.validity_warnings
            );
        }
        Trace::from_parts(TraceParts {
            road: self.road,
            dt: self.config.dt,
            seed: self.config.seed,
            profiles: self.profiles,
            states: self.history,
            collisions: self.collisions,
            events: self.events,
            departures: self.departures,
        })
    }
}
