//! Virtual noise: standardized thresholds, noise CDFs and per-child noise counts.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution assumed for the virtual noise at one split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Uniform,
    Normal,
    Bimodal,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::Uniform, NoiseKind::Normal, NoiseKind::Bimodal];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Normal => "normal",
            NoiseKind::Bimodal => "bimodal",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Standardizes a threshold against the node's value range, which is taken to
/// span six standard deviations around its midpoint. Thresholds inside the
/// range map into `[-3, 3]`.
pub fn standardize(tau: f64, node_min: f64, node_max: f64) -> Result<f64> {
    if !(node_max > node_min) {
        return Err(Error::DegenerateFeature(node_min));
    }
    let mu = (node_max + node_min) / 2.0;
    let sigma = (node_max - node_min) / 6.0;
    Ok((tau - mu) / sigma)
}

const BETA_1: f64 = -0.0004406;
const BETA_2: f64 = 0.04181198;
const BETA_3: f64 = 0.9;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Logistic approximation of the standard normal CDF.
#[inline]
pub fn normal_cdf_approx(z: f64) -> f64 {
    let z2 = z * z;
    let poly = z * (BETA_3 + z2 * (BETA_2 + z2 * BETA_1));
    1.0 / (1.0 + libm::exp(-SQRT_PI * poly))
}

fn bimodal_unnormalized(z: f64) -> f64 {
    normal_cdf_approx(z - 3.0) + normal_cdf_approx(z + 3.0)
}

/// `P(noise <= z)` for the given distribution on the standardized node interval.
///
/// The bimodal sum of two shifted normals reaches 2 at the right end, so it is
/// truncated to `[-3, 3]` and renormalized to a proper CDF there.
pub fn noise_cdf(kind: NoiseKind, z: f64) -> f64 {
    let z = if (-3.0..=3.0).contains(&z) {
        z
    } else {
        if !(-3.0 - 1e-9..=3.0 + 1e-9).contains(&z) {
            log::warn!("standardized threshold {z} outside [-3, 3], clamping");
        }
        z.clamp(-3.0, 3.0)
    };
    let p = match kind {
        NoiseKind::Uniform => z / 6.0 + 0.5,
        NoiseKind::Normal => normal_cdf_approx(z),
        NoiseKind::Bimodal => {
            let lo = bimodal_unnormalized(-3.0);
            let hi = bimodal_unnormalized(3.0);
            (bimodal_unnormalized(z) - lo) / (hi - lo)
        }
    };
    p.clamp(0.0, 1.0)
}

/// Splits a node's virtual noise mass (equal to its real count) between the
/// two children according to `p = P(noise <= z)`.
pub fn estimate_noise_children(m_real_node: usize, p: f64) -> (f64, f64) {
    let m = m_real_node as f64;
    let left = m * p;
    (left, m - left)
}
