use proptest::prelude::*;
use xmurf_core::scenario::*;
use xmurf_core::sim::*;

/// Reference detector: mark triggered samples, fill every short untriggered
/// gap between two triggered samples, take maximal marked runs, keep those
/// reaching the keep threshold.
fn oracle(thw: &[f64], dt: f64) -> Vec<Window> {
    let trig: Vec<bool> = thw.iter().map(|&h| h <= 1.0).collect();
    let mut marked = trig.clone();
    let limit = (1.0 / dt).round() as usize;
    for i in 0..thw.len() {
        for j in i + 1..thw.len() {
            if trig[i] && trig[j] && (i + 1..j).all(|k| !trig[k]) && j - i - 1 < limit {
                marked[i..j].iter_mut().for_each(|m| *m = true);
            }
        }
    }
    let mut out = Vec::new();
    let mut t = 0;
    while t < thw.len() {
        if marked[t] {
            let s = t;
            while t + 1 < thw.len() && marked[t + 1] {
                t += 1;
            }
            if thw[s..=t].iter().any(|&h| h <= 0.8) {
                out.push(Window { start: s, end: t });
            }
        }
        t += 1;
    }
    out
}

fn headway() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.0f64..0.8,
        0.8f64..=1.0,
        1.0f64..3.0,
        Just(0.8),
        Just(1.0),
        Just(f64::INFINITY),
    ]
}

proptest! {
    #[test]
    fn detector_matches_oracle(
        thw in prop::collection::vec(headway(), 1..120),
        dt in prop_oneof![Just(0.05), Just(0.1), Just(0.25)],
    ) {
        prop_assert_eq!(detect_in_series(&thw, dt), oracle(&thw, dt));
    }

    #[test]
    fn detected_windows_satisfy_invariants(thw in prop::collection::vec(headway(), 1..120)) {
        for w in detect_in_series(&thw, 0.1) {
            prop_assert!(thw[w.start] <= 1.0 && thw[w.end] <= 1.0);
            let sc = Scenario::from_window(0, w, &thw);
            prop_assert!(sc.thw_min <= 0.8);
            prop_assert!(sc.t_start <= sc.t_changepoint && sc.t_changepoint <= sc.t_end);
            prop_assert_eq!(thw[sc.t_changepoint], sc.thw_min);
        }
    }
}

fn still_profile() -> BehaviorProfile {
    BehaviorProfile {
        max_accel: 2.0,
        max_decel: GRAVITY,
        gompertz_b: 3.0,
        gompertz_c: 0.1,
        risk: 0.5,
        patience: 0.5,
        politeness: 0.5,
        reaction_time: 0.5,
        target_speed: 20.0,
        lane_change_rate: 0.0,
    }
}

fn car(x: f64, v: f64, lane: u8) -> VehicleState {
    VehicleState {
        x,
        y: RoadConfig::default().lane_center(lane),
        v,
        a: 0.0,
        psi: 0.0,
        delta: 0.0,
        lane,
    }
}

/// Constant-speed convoy: vehicle positions advance by `v * dt` per step.
fn convoy(cars: &[VehicleState], steps: usize) -> Trace {
    let dt = 0.1;
    let states = (0..steps)
        .map(|t| {
            cars.iter()
                .map(|c| VehicleState {
                    x: c.x + c.v * dt * t as f64,
                    ..*c
                })
                .collect()
        })
        .collect();
    Trace::new(
        RoadConfig::default(),
        dt,
        0,
        vec![still_profile(); cars.len()],
        states,
        vec![],
        vec![],
    )
    .unwrap()
}

#[test]
fn zone_examples() {
    let alone = convoy(&[car(0.0, 20.0, 2)], 3);
    assert!(assign_zones(&alone, 0, 0).slots.iter().all(Option::is_none));

    let tr = convoy(&[car(0.0, 20.0, 2), car(10.0, 18.0, 2), car(30.0, 20.0, 2)], 3);
    let occ = assign_zones(&tr, 0, 0);
    let front = occ.get(Zone::Front).unwrap();
    assert_eq!((front.id, front.distance, front.rel_velocity), (1, 10.0, -2.0));
    assert_eq!(occ.slots.iter().filter(|s| s.is_some()).count(), 1);

    let tr = convoy(
        &[car(0.0, 20.0, 2), car(-5.0, 20.0, 3), car(15.0, 20.0, 1), car(-200.0, 20.0, 2), car(0.0, 20.0, 1)],
        3,
    );
    let occ = assign_zones(&tr, 0, 0);
    assert_eq!(occ.get(Zone::LeftRear).unwrap().id, 1);
    assert_eq!(occ.get(Zone::RightFront).unwrap().id, 2);
    assert_eq!(occ.get(Zone::RightRear).unwrap().id, 4);
    assert!(occ.get(Zone::Rear).is_none(), "beyond the extent");
    assert_eq!(occ.extent, 40.0);
}

#[test]
fn names_are_fixed_and_unique() {
    let names = feature_names();
    assert_eq!(names.len(), N_FEATURES);
    let set: std::collections::BTreeSet<_> = names.iter().collect();
    assert_eq!(set.len(), N_FEATURES);
    assert_eq!(names[0], "dist_front_start");
    assert_eq!(names[7], "dist_rear_change");
    assert_eq!(names[18], "relvel_front_start");
    assert_eq!(names[36], "thw_min");
    assert_eq!(names[38], "dtw_gap");
    assert_eq!(names[41], "lane_end");
    assert_eq!(names[46], "speed_change");
}

#[test]
fn lone_ego_reads_ceilings() {
    let tr = convoy(&[car(0.0, 25.0, 1)], 20);
    let thw = vec![0.5; 20];
    let sc = Scenario::from_window(0, Window { start: 2, end: 15 }, &thw);
    let f = extract_features(&sc, &tr);
    assert_eq!(f.len(), N_FEATURES);
    for k in 0..18 {
        assert_eq!(f[k], 50.0);
        assert_eq!(f[18 + k], 0.0);
    }
    assert_eq!(f[36], 0.5);
    assert!((f[37] - 1.3).abs() < 1e-12);
    assert_eq!(&f[39..43], &[1.0, 1.0, 1.0, 3.0]);
    assert_eq!(&f[43..47], &[0.0, 0.0, 0.0, 25.0]);
}

#[test]
fn desired_gap_gives_zero_dtw() {
    let v = 20.0;
    let tr = convoy(&[car(0.0, v, 2), car(1.8 * v + VEHICLE_LENGTH, v, 2)], 30);
    let thw = thw_series(&tr, 0);
    assert!(thw.iter().all(|&h| (h - 1.8).abs() < 1e-12));
    let sc = Scenario::from_window(0, Window { start: 0, end: 29 }, &thw);
    let f = extract_features(&sc, &tr);
    assert!(f[38].abs() < 1e-9, "{}", f[38]);
    assert_eq!(f[36], sc.thw_series.iter().cloned().fold(f64::INFINITY, f64::min));
}

#[test]
fn simulated_scenarios_are_well_formed() {
    let road = RoadConfig::default();
    let mut total = 0;
    for seed in 0..6 {
        let tr = run_simulation(&road, &SimConfig { seed, ..SimConfig::default() }).unwrap();
        let scs = detect_scenarios(&tr);
        let feats = extract_all(&scs, &tr);
        for (sc, f) in scs.iter().zip(&feats) {
            total += 1;
            assert!(sc.thw_min <= THW_KEEP);
            assert!(sc.thw_series[0] <= THW_TRIGGER && *sc.thw_series.last().unwrap() <= THW_TRIGGER);
            assert_eq!(f.len(), N_FEATURES);
            assert!(f.iter().all(|x| x.is_finite()));
            assert_eq!(f[36], sc.thw_min);
            assert_eq!(extract_features(sc, &tr), *f);
        }
    }
    assert!(total > 0);
}
