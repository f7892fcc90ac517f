use alloc::{vec, vec::Vec};

use crate::error::{Error, Result};

/// Dynamic time warping distance with local cost `|a - b|`, unconstrained
/// window, both ends aligned.
pub fn dtw_distance(s1: &[f64], s2: &[f64]) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySequence);
    }
    let m = s2.len();
    let mut prev: Vec<f64> = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &a in s1 {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = libm::fabs(a - s2[j - 1]) + best;
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}
