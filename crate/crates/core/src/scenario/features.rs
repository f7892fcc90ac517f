use alloc::{format, string::String, vec::Vec};

use super::{assign_zones, dtw_distance, zone_extent, Scenario, Zone, DESIRED_HEADWAY};
use crate::dataset::FeatureVector;
use crate::sim::{Trace, VEHICLE_LENGTH};

pub const N_FEATURES: usize = 47;

const INSTANTS: [&str; 3] = ["start", "change", "end"];

/// Column names of the feature layout, in order:
///
/// * 0..18: distance to the nearest vehicle per zone, index `instant * 6 + zone`
/// * 18..36: relative velocity per zone, same indexing
/// * 36: minimum headway; 37: duration; 38: DTW between actual and desired leader gap
/// * 39..42: ego lane at the three instants; 42: lane count
/// * 43: ego lane changes; 44: cut-in flag; 45: collision flag; 46: ego speed at the changepoint
///
/// Instants are the start, the changepoint and the end of the scenario; zones
/// follow [`Zone::ALL`].
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(N_FEATURES);
    for quantity in ["dist", "relvel"] {
        for instant in INSTANTS {
            for zone in Zone::ALL {
                names.push(format!("{quantity}_{}_{instant}", zone.as_str()));
            }
        }
    }
    names.extend(["thw_min", "duration", "dtw_gap"].map(String::from));
    names.extend(INSTANTS.map(|i| format!("lane_{i}")));
    names.extend(
        ["n_lanes", "lane_changes", "cut_in", "collision", "speed_change"].map(String::from),
    );
    names
}

/// Feature vector of one scenario. Empty zones read as the zone extent and a
/// relative velocity of zero.
pub fn extract_features(sc: &Scenario, trace: &Trace) -> FeatureVector {
    let ego = sc.ego;
    let dt = trace.dt();
    let mut f = [0.0f64; N_FEATURES];

    for (k, &t) in sc.instants().iter().enumerate() {
        let occ = assign_zones(trace, ego, t);
        for zone in Zone::ALL {
            let (d, v) = occ
                .get(zone)
                .map_or((occ.extent, 0.0), |n| (n.distance, n.rel_velocity));
            f[k * 6 + zone.index()] = d;
            f[18 + k * 6 + zone.index()] = v;
        }
        f[39 + k] = trace.at(t)[ego].lane as f64;
    }

    f[36] = sc.thw_min;
    f[37] = (sc.t_end - sc.t_start) as f64 * dt;

    let window = sc.t_start..=sc.t_end;
    let (actual, desired): (Vec<f64>, Vec<f64>) = window
        .clone()
        .map(|t| {
            let me = trace.at(t)[ego];
            let gap = match trace.leader_of(t, ego) {
                Some(l) => (trace.at(t)[l].x - me.x - VEHICLE_LENGTH).max(0.0),
                None => zone_extent(me.v),
            };
            (gap, DESIRED_HEADWAY * me.v)
        })
        .unzip();
    f[38] = dtw_distance(&actual, &desired).expect("scenario windows are non-empty");

    f[42] = trace.road().lanes as f64;

    let mut lane_changes = 0usize;
    let mut cut_in = false;
    for t in sc.t_start + 1..=sc.t_end {
        let (prev, now) = (trace.at(t - 1), trace.at(t));
        if now[ego].lane != prev[ego].lane {
            lane_changes += 1;
        }
        if !cut_in {
            let occ = assign_zones(trace, ego, t);
            if let Some(n) = occ.get(Zone::Front) {
                cut_in = prev[n.id].lane != now[n.id].lane;
            }
        }
    }
    f[43] = lane_changes as f64;
    f[44] = cut_in as u8 as f64;
    f[45] = trace
        .collisions()
        .iter()
        .any(|c| (c.a == ego || c.b == ego) && window.contains(&c.t)) as u8 as f64;
    f[46] = trace.at(sc.t_changepoint)[ego].v;

    FeatureVector(f.to_vec())
}

/// Features of many scenarios from one trace, in input order.
pub fn extract_all(scenarios: &[Scenario], trace: &Trace) -> Vec<FeatureVector> {
    crate::par::map_indices(scenarios.len(), |i| extract_features(&scenarios[i], trace))
}
