//! Blue-to-yellow colormap and binary PPM encoding of a proximity matrix.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::ProximityMatrix;

/// Viridis control points, evenly spaced over `[0, 1]`.
pub const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

/// Linear interpolation between the control points; `v` is clamped to `[0, 1]`.
pub fn colormap(v: f64) -> [u8; 3] {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    let scaled = v * (VIRIDIS.len() - 1) as f64;
    let k = (scaled as usize).min(VIRIDIS.len() - 2);
    let t = scaled - k as f64;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    let mut out = [0u8; 3];
    for c in 0..3 {
        let x = a[c] as f64 + t * (b[c] as f64 - a[c] as f64);
        out[c] = libm::round(x) as u8;
    }
    out
}

/// Binary PPM (P6) image with one pixel per matrix entry, row `i` as image row `i`.
pub fn heatmap_ppm(p: &ProximityMatrix) -> Vec<u8> {
    let m = p.len();
    let header = format!("P6\n{m} {m}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * m * m);
    out.extend_from_slice(header.as_bytes());
    for &v in p.values() {
        out.extend_from_slice(&colormap(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn endpoints() {
        assert_eq!(colormap(0.0), VIRIDIS[0]);
        assert_eq!(colormap(1.0), VIRIDIS[8]);
        assert_eq!(colormap(0.5), VIRIDIS[4]);
        assert_eq!(colormap(2.0), VIRIDIS[8]);
    }

    #[test]
    fn luminance_increases() {
        let lum = |c: [u8; 3]| 0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64;
        let mut prev = -1.0;
        for k in 0..=100 {
            let l = lum(colormap(k as f64 / 100.0));
            assert!(l >= prev - 0.5);
            prev = l;
        }
    }

    #[test]
    fn all_ones_is_uniform_bright() {
        let m = 3;
        let p = ProximityMatrix::new((0..m).map(|i| i.to_string()).collect(), vec![1.0; 9]).unwrap();
        let img = heatmap_ppm(&p);
        let header = b"P6\n3 3\n255\n";
        assert_eq!(&img[..header.len()], header);
        let pixels = &img[header.len()..];
        assert_eq!(pixels.len(), 3 * m * m);
        assert!(pixels.chunks(3).all(|px| px == VIRIDIS[8]));
    }
}
