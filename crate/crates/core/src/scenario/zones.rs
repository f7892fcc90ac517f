use serde::{Deserialize, Serialize};

use crate::sim::{Trace, VehicleId};

/// The six regions around an ego vehicle. Left is the lane with the next
/// higher index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Front,
    Rear,
    LeftFront,
    LeftRear,
    RightFront,
    RightRear,
}

impl Zone {
    pub const ALL: [Zone; 6] = [
        Zone::Front,
        Zone::Rear,
        Zone::LeftFront,
        Zone::LeftRear,
        Zone::RightFront,
        Zone::RightRear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Front => "front",
            Zone::Rear => "rear",
            Zone::LeftFront => "left_front",
            Zone::LeftRear => "left_rear",
            Zone::RightFront => "right_front",
            Zone::RightRear => "right_rear",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn of(lane_offset: i16, ahead: bool) -> Option<Zone> {
        Some(match (lane_offset, ahead) {
            (0, true) => Zone::Front,
            (0, false) => Zone::Rear,
            (1, true) => Zone::LeftFront,
            (1, false) => Zone::LeftRear,
            (-1, true) => Zone::RightFront,
            (-1, false) => Zone::RightRear,
            _ => return None,
        })
    }
}

/// Closest vehicle in one zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: VehicleId,
    /// Absolute longitudinal distance between reference points, m.
    pub distance: f64,
    /// Neighbour speed minus ego speed, m/s.
    pub rel_velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneOccupancy {
    pub slots: [Option<Neighbor>; 6],
    /// Longitudinal reach of every zone at this instant, m.
    pub extent: f64,
}

impl ZoneOccupancy {
    pub fn get(&self, zone: Zone) -> Option<&Neighbor> {
        self.slots[zone.index()].as_ref()
    }
}

/// Longitudinal zone length for ego speed `v`: two seconds of travel,
/// limited to 20..=120 m.
pub fn zone_extent(v: f64) -> f64 {
    (2.0 * v).clamp(20.0, 120.0)
}

/// Nearest vehicle per zone around `ego` at timestep `t`. Vehicles level with
/// the ego count as behind it.
pub fn assign_zones(trace: &Trace, ego: VehicleId, t: usize) -> ZoneOccupancy {
    let snap = trace.at(t);
    let me = snap[ego];
    let extent = zone_extent(me.v);
    let mut slots: [Option<Neighbor>; 6] = [None; 6];
    for (id, s) in snap.iter().enumerate() {
        if id == ego || !trace.is_active(t, id) {
            continue;
        }
        let dx = s.x - me.x;
        let Some(zone) = Zone::of(s.lane as i16 - me.lane as i16, dx > 0.0) else {
            continue;
        };
        let distance = libm::fabs(dx);
        if distance > extent {
            continue;
        }
        let slot = &mut slots[zone.index()];
        if slot.is_none_or(|n| distance < n.distance) {
            *slot = Some(Neighbor {
                id,
                distance,
                rel_velocity: s.v - me.v,
            });
        }
    }
    ZoneOccupancy { slots, extent }
}
