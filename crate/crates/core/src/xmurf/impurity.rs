//! Two-class Gini impurity over real and (fractional) virtual noise counts.

use alloc::format;

use crate::error::{Error, Result};

/// Gini impurity of a node holding `count_real` datapoints and `count_noise`
/// estimated noise points. Always in `[0, 0.5]`.
pub fn gini(count_real: usize, count_noise: f64) -> Result<f64> {
    let real = count_real as f64;
    if !(count_noise >= 0.0) || real + count_noise <= 0.0 {
        return Err(Error::EmptyNode);
    }
    Ok(gini_raw(real, count_noise))
}

#[inline]
pub(crate) fn gini_raw(real: f64, noise: f64) -> f64 {
    let total = real + noise;
    let p = real / total;
    let q = noise / total;
    p * (1.0 - p) + q * (1.0 - q)
}

/// Gini gain of splitting `parent` into `left` and `right`. Each argument is a
/// `(real, noise)` pair; per-class counts must be conserved (noise within 1e-9).
pub fn gini_gain(parent: (usize, f64), left: (usize, f64), right: (usize, f64)) -> Result<f64> {
    if left.0 + right.0 != parent.0 {
        return Err(Error::Conservation(format!(
            "real counts {} + {} != {}",
            left.0, right.0, parent.0
        )));
    }
    if (left.1 + right.1 - parent.1).abs() > 1e-9 {
        return Err(Error::Conservation(format!(
            "noise counts {} + {} != {}",
            left.1, right.1, parent.1
        )));
    }
    let r_parent = gini(parent.0, parent.1)?;
    let total = parent.0 as f64 + parent.1;
    let mut gain = r_parent;
    for (real, noise) in [left, right] {
        let m = real as f64 + noise;
        if m > 0.0 {
            gain -= m / total * gini_raw(real as f64, noise);
        }
    }
    Ok(gain)
}

/// Gain for a node with `n` real points and `n` noise points, split so that
/// `real_left` reals and `noise_left` noise points go left.
#[inline]
pub(crate) fn balanced_gain(n: f64, real_left: f64, noise_left: f64) -> f64 {
    let total = 2.0 * n;
    let real_right = n - real_left;
    let noise_right = n - noise_left;
    let ml = real_left + noise_left;
    let mr = real_right + noise_right;
    let mut gain = 0.5;
    if ml > 0.0 {
        gain -= ml / total * gini_raw(real_left, noise_left);
    }
    if mr > 0.0 {
        gain -= mr / total * gini_raw(real_right, noise_right);
    }
    gain
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gini_examples() {
        assert_eq!(gini(5, 5.0).unwrap(), 0.5);
        assert_eq!(gini(10, 0.0).unwrap(), 0.0);
        // 2 * (3/4) * (1/4)
        assert_eq!(gini(3, 1.0).unwrap(), 0.375);
        assert_eq!(gini(0, 0.0), Err(Error::EmptyNode));
    }

    #[test]
    fn gain_examples() {
        assert_eq!(gini_gain((5, 5.0), (5, 0.0), (0, 5.0)).unwrap(), 0.5);
        assert!(gini_gain((4, 4.0), (2, 2.0), (2, 2.0)).unwrap().abs() < 1e-15);
        // 0.5 - 2 * (1/2) * 0.375
        assert_eq!(gini_gain((4, 4.0), (3, 1.0), (1, 3.0)).unwrap(), 0.125);
        assert!(matches!(
            gini_gain((4, 4.0), (3, 1.0), (2, 3.0)),
            Err(Error::Conservation(_))
        ));
        assert!(matches!(
            gini_gain((4, 4.0), (3, 1.0), (1, 2.5)),
            Err(Error::Conservation(_))
        ));
    }

    #[test]
    fn balanced_gain_agrees_with_checked_gain() {
        for &(n, rl, p) in &[(10usize, 3usize, 0.2), (7, 7, 0.9), (4, 1, 0.5), (9, 0, 0.1)] {
            let nl = n as f64 * p;
            let nr = n as f64 - nl;
            let checked = gini_gain((n, n as f64), (rl, nl), (n - rl, nr)).unwrap();
            let fast = balanced_gain(n as f64, rl as f64, nl);
            assert!((checked - fast).abs() < 1e-15, "{checked} vs {fast}");
        }
    }
}
