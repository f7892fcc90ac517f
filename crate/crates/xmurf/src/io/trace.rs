//! Trace JSON lines, one object per timestep, plus a `.meta.json` sidecar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xmurf_core::sim::{BehaviorProfile, Collision, LaneEvent, RoadConfig, Trace, TraceParts, VehicleState};

use super::{read_bytes, read_json, write_bytes, write_json};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct VehicleLine {
    id: usize,
    x: f64,
    y: f64,
    v: f64,
    a: f64,
    psi: f64,
    lane: u8,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct Pair {
    a: usize,
    b: usize,
}

#[derive(Serialize, Deserialize)]
struct StepLine {
    t: usize,
    vehicles: Vec<VehicleLine>,
    collisions: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    dt: f64,
    seed: u64,
    road: RoadConfig,
    profiles: Vec<BehaviorProfile>,
    events: Vec<LaneEvent>,
    /// First step each vehicle is off the road; absent means never.
    #[serde(default)]
    departures: Vec<Option<usize>>,
}

/// `trace_3.jsonl` -> `trace_3.meta.json`.
pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn save_trace(trace: &Trace, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for (t, snap) in trace.states().iter().enumerate() {
        let line = StepLine {
            t,
            vehicles: snap
                .iter()
                .enumerate()
                .map(|(id, s)| VehicleLine {
                    id,
                    x: s.x,
                    y: s.y,
                    v: s.v,
                    a: s.a,
                    psi: s.psi,
                    lane: s.lane,
                    delta: s.delta,
                })
                .collect(),
            collisions: trace
                .collisions()
                .iter()
                .filter(|c| c.t == t)
                .map(|c| Pair { a: c.a, b: c.b })
                .collect(),
        };
        serde_json::to_writer(&mut out, &line).expect("serialisable");
        out.push(b'\n');
    }
    write_bytes(path, &out)?;
    write_json(
        &meta_path(path),
        &Meta {
            dt: trace.dt(),
            seed: trace.seed(),
            road: *trace.road(),
            profiles: trace.profiles().to_vec(),
            events: trace.events().to_vec(),
            departures: trace.departures().to_vec(),
        },
    )
}

pub fn load_trace(path: &Path) -> Result<Trace> {
    let meta: Meta = read_json(&meta_path(path))?;
    let bytes = read_bytes(path)?;
    let mut states = Vec::new();
    let mut collisions = Vec::new();
    for (k, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let step: StepLine = serde_json::from_slice(line)
            .map_err(|e| Error::input(path, format!("line {}: {e}", k + 1)))?;
        if step.t != states.len() {
            return Err(Error::input(path, format!("line {}: expected t = {}, found {}", k + 1, states.len(), step.t)));
        }
        let mut snap = Vec::with_capacity(step.vehicles.len());
        for (i, v) in step.vehicles.into_iter().enumerate() {
            if v.id != i {
                return Err(Error::input(path, format!("line {}: vehicle ids must be 0.. in order", k + 1)));
            }
            snap.push(VehicleState {
                x: v.x,
                y: v.y,
                v: v.v,
                a: v.a,
                psi: v.psi,
                delta: v.delta,
                lane: v.lane,
            });
        }
        collisions.extend(step.collisions.iter().map(|c| Collision { t: step.t, a: c.a, b: c.b }));
        states.push(snap);
    }
    Trace::from_parts(TraceParts {
        road: meta.road,
        dt: meta.dt,
        seed: meta.seed,
        profiles: meta.profiles,
        states,
        collisions,
        events: meta.events,
        departures: meta.departures,
    })
    .map_err(|e| Error::input(path, e))
}
