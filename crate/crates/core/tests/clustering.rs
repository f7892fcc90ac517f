mod common;

use common::{adjusted_rand, blobs};
use xmurf_core::ordering::{linkage, Linkage};
use xmurf_core::xmurf::{fit, proximity_matrix};

#[test]
fn adjusted_rand_oracle_sanity() {
    assert_eq!(adjusted_rand(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
    assert!(adjusted_rand(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 0.0);
}

#[test]
fn two_blobs_within_exceeds_cross() {
    let (data, truth) = blobs(&[vec![0.0, 0.0], vec![10.0, 0.0]], 50, 7);
    let forest = fit(&data, 100, 1).unwrap();
    let p = proximity_matrix(&forest, &data).unwrap();
    let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
    for i in 0..data.len() {
        for j in 0..data.len() {
            if i == j {
                continue;
            }
            if truth[i] == truth[j] {
                within += p.get(i, j);
                nw += 1;
            } else {
                cross += p.get(i, j);
                nc += 1;
            }
        }
    }
    let (within, cross) = (within / nw as f64, cross / nc as f64);
    assert!(within > cross, "within {within} cross {cross}");
}

#[test]
fn three_blobs_mostly_recovered() {
    // Pairwise centroid distance 10 along separate axes.
    let a = 10.0 / 2f64.sqrt();
    let centres: Vec<Vec<f64>> = (0..3)
        .map(|k| {
            let mut c = vec![0.0; 5];
            c[k] = a;
            c
        })
        .collect();
    let mut aris = Vec::new();
    for seed in 0..4 {
        let (data, truth) = blobs(&centres, 50, 100 + seed);
        let forest = fit(&data, 100, seed).unwrap();
        let p = proximity_matrix(&forest, &data).unwrap();
        let d = linkage(&p, Linkage::Average).unwrap();
        aris.push(adjusted_rand(&d.cut(3), &truth));
    }
    // Clearly better than chance on every seed; the strict 0.9 gate lives in
    // the acceptance suite.
    assert!(aris.iter().all(|&a| a > 0.7), "{aris:?}");
}
