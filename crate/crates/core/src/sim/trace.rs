//! Recorded simulation output.

use alloc::{format, vec, vec::Vec};

use serde::{Deserialize, Serialize};

use super::{BehaviorProfile, RoadConfig, VehicleState};
use crate::error::{Error, Result};

pub type VehicleId = usize;

/// Two vehicles whose bodies overlapped, or that swapped order within a lane,
/// on reaching timestep `t`. Both are frozen from then on and may later leave
/// the road (see [`Trace::departures`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub t: usize,
    pub a: VehicleId,
    pub b: VehicleId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LaneEventKind {
    Motivated { target: u8 },
    Start { from: u8, to: u8 },
    Abort { from: u8, to: u8 },
    Complete { lane: u8 },
    GiveUp { target: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaneEvent {
    pub t: usize,
    pub vehicle: VehicleId,
    #[serde(flatten)]
    pub kind: LaneEventKind,
}

/// Lane occupancy per timestep: for each lane, vehicle ids ordered front to
/// back, padded to the lane capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexArray {
    lanes: usize,
    capacity: usize,
    slots: Vec<u32>,
}

const EMPTY: u32 = u32::MAX;

impl IndexArray {
    fn build(road: &RoadConfig, states: &[Vec<VehicleState>], departures: &[Option<usize>]) -> Result<Self> {
        let lanes = road.lanes as usize;
        let capacity = road.vehicles_per_lane;
        let mut slots = vec![EMPTY; states.len() * lanes * capacity];
        let mut per_lane: Vec<Vec<usize>> = vec![Vec::new(); lanes];
        for (t, snap) in states.iter().enumerate() {
            per_lane.iter_mut().for_each(Vec::clear);
            for (id, s) in snap.iter().enumerate() {
                if departures[id].is_some_and(|d| t >= d) {
                    continue;
                }
                if s.lane == 0 || s.lane as usize > lanes {
                    return Err(Error::Dataset(format!(
                        "vehicle {id} at step {t} is in lane {} of {lanes}",
                        s.lane
                    )));
                }
                per_lane[s.lane as usize - 1].push(id);
            }
            for (l, ids) in per_lane.iter_mut().enumerate() {
                if ids.len() > capacity {
                    return Err(Error::Dataset(format!(
                        "lane {} holds {} vehicles at step {t}, capacity {capacity}",
                        l + 1,
                        ids.len()
                    )));
                }
                ids.sort_by(|&i, &j| snap[j].x.total_cmp(&snap[i].x).then(i.cmp(&j)));
                let base = (t * lanes + l) * capacity;
                for (k, &id) in ids.iter().enumerate() {
                    slots[base + k] = id as u32;
                }
            }
        }
        Ok(Self {
            lanes,
            capacity,
            slots,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Vehicle in slot `k` of `lane` (1-based) at step `t`, front first.
    pub fn get(&self, t: usize, lane: u8, k: usize) -> Option<VehicleId> {
        let l = (lane as usize).checked_sub(1)?;
        if l >= self.lanes || k >= self.capacity {
            return None;
        }
        match self.slots.get((t * self.lanes + l) * self.capacity + k) {
            Some(&EMPTY) | None => None,
            Some(&id) => Some(id as VehicleId),
        }
    }

    /// Occupants of `lane` at step `t`, front first.
    pub fn lane(&self, t: usize, lane: u8) -> impl Iterator<Item = VehicleId> + '_ {
        (0..self.capacity).map_while(move |k| self.get(t, lane, k))
    }
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    road: RoadConfig,
    dt: f64,
    seed: u64,
    profiles: Vec<BehaviorProfile>,
    states: Vec<Vec<VehicleState>>,
    index: IndexArray,
    departures: Vec<Option<usize>>,
    collisions: Vec<Collision>,
    events: Vec<LaneEvent>,
}

/// Raw contents of a trace, checked and indexed by [`Trace::from_parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceParts {
    pub road: RoadConfig,
    pub dt: f64,
    pub seed: u64,
    pub profiles: Vec<BehaviorProfile>,
    pub states: Vec<Vec<VehicleState>>,
    pub collisions: Vec<Collision>,
    pub events: Vec<LaneEvent>,
    /// First step each vehicle is off the road. It keeps its last state in
    /// the snapshots but leaves the index array. Empty means nobody leaves.
    pub departures: Vec<Option<usize>>,
}

impl Trace {
    /// Assembles a trace in which every vehicle stays on the road.
    pub fn new(
        road: RoadConfig,
        dt: f64,
        seed: u64,
        profiles: Vec<BehaviorProfile>,
        states: Vec<Vec<VehicleState>>,
        collisions: Vec<Collision>,
        events: Vec<LaneEvent>,
    ) -> Result<Self> {
        Self::from_parts(TraceParts {
            road,
            dt,
            seed,
            profiles,
            states,
            collisions,
            events,
            departures: Vec::new(),
        })
    }

    /// Checks that every snapshot covers the same vehicles and rebuilds the
    /// lane index.
    pub fn from_parts(parts: TraceParts) -> Result<Self> {
        let TraceParts { road, dt, seed, profiles, states, collisions, events, mut departures } = parts;
        road.validate()?;
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt {dt} must be positive")));
        }
        let n = profiles.len();
        if let Some((t, s)) = states.iter().enumerate().find(|(_, s)| s.len() != n) {
            return Err(Error::Dataset(format!(
                "step {t} has {} vehicles, expected {n}",
                s.len()
            )));
        }
        if let Some(c) = collisions.iter().find(|c| c.a >= n || c.b >= n || c.t >= states.len()) {
            return Err(Error::Dataset(format!("collision {c:?} refers to unknown vehicle or step")));
        }
        if departures.is_empty() {
            departures = vec![None; n];
        } else if departures.len() != n {
            return Err(Error::Dataset(format!("{} departures for {n} vehicles", departures.len())));
        }
        let index = IndexArray::build(&road, &states, &departures)?;
        Ok(Self {
            road,
            dt,
            seed,
            profiles,
            states,
            index,
            departures,
            collisions,
            events,
        })
    }

    pub fn road(&self) -> &RoadConfig {
        &self.road
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profiles(&self) -> &[BehaviorProfile] {
        &self.profiles
    }

    pub fn n_steps(&self) -> usize {
        self.states.len()
    }

    pub fn n_vehicles(&self) -> usize {
        self.profiles.len()
    }

    pub fn states(&self) -> &[Vec<VehicleState>] {
        &self.states
    }

    pub fn at(&self, t: usize) -> &[VehicleState] {
        &self.states[t]
    }

    pub fn index(&self) -> &IndexArray {
        &self.index
    }

    /// First step each vehicle is off the road, if it ever leaves.
    pub fn departures(&self) -> &[Option<usize>] {
        &self.departures
    }

    /// Whether `vehicle` is on the road at step `t`.
    pub fn is_active(&self, t: usize, vehicle: VehicleId) -> bool {
        self.departures[vehicle].is_none_or(|d| t < d)
    }

    pub fn collisions(&self) -> &[Collision] {
        &self.collisions
    }

    pub fn events(&self) -> &[LaneEvent] {
        &self.events
    }

    /// Same-lane predecessor of `vehicle` at step `t`.
    pub fn leader_of(&self, t: usize, vehicle: VehicleId) -> Option<VehicleId> {
        let lane = self.states[t][vehicle].lane;
        let mut prev = None;
        for id in self.index.lane(t, lane) {
            if id == vehicle {
                return prev;
            }
            prev = Some(id);
        }
        None
    }
}
