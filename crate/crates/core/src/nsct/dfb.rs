//! Nonsubsampled directional filter bank.
//!
//! A binary tree of two-channel fan filter banks with no decimation. Each node
//! splits its input `x` into `x * h` and `x - x * h`, so the leaves sum back to
//! the root. The prototype `h` is a diamond lowpass built from a maximally flat
//! 1-D halfband filter on the quincunx lattice; it is modulated into a fan
//! filter for the first stage, upsampled by the quincunx matrix for the second,
//! and sheared into parallelogram filters for every stage after that.

use rayon::prelude::*;

use super::filter::{filter2d, BoundaryMode, FilterKernel2D};
use crate::error::{Error, Result};
use crate::raster::BandImage;

/// Odd taps `a_1, a_3, a_5` of the maximally flat halfband filter
/// `[3, 0, -25, 0, 150, 256, 150, 0, -25, 0, 3] / 512`.
const HALFBAND_ODD: [(isize, f64); 3] = [(1, 150.0 / 512.0), (3, -25.0 / 512.0), (5, 3.0 / 512.0)];

/// Diamond-support lowpass: `D(w) = 1/2 + 2 A((w_r + w_c)/2) A((w_r - w_c)/2)` where
/// `A` is the odd part of the halfband filter.
pub fn diamond_kernel() -> FilterKernel2D {
    let odd: Vec<(isize, f64)> = HALFBAND_ODD.iter().flat_map(|&(k, a)| [(k, a), (-k, a)]).collect();
    let mut taps = vec![(0, 0, 0.5)];
    for &(k, ak) in &odd {
        for &(l, al) in &odd {
            taps.push(((k + l) / 2, (k - l) / 2, 2.0 * ak * al));
        }
    }
    FilterKernel2D::from_offsets(&taps).expect("diamond taps are valid")
}

/// First-stage fan filter. Passes the fan around the horizontal-frequency axis
/// (`|w_r| < |w_c|`), i.e. vertically oriented structure.
pub fn fan_kernel() -> FilterKernel2D {
    diamond_kernel().modulated(false)
}

const QUINCUNX: [[isize; 2]; 2] = [[1, -1], [1, 1]];
const SHEARS: [[[isize; 2]; 2]; 4] = [[[1, 1], [0, 1]], [[1, -1], [0, 1]], [[1, 0], [1, 1]], [[1, 0], [-1, 1]]];

fn mat_mul(a: [[isize; 2]; 2], b: [[isize; 2]; 2]) -> [[isize; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Analysis kernels of the tree: `stages[s][k]` splits node `k` at depth `s`.
/// A tree for `2^depth` directions has `depth` stages.
pub fn nsdfb_kernels(depth: usize) -> Vec<Vec<FilterKernel2D>> {
    let diamond = diamond_kernel();
    let fan = fan_kernel();
    let mut stages = Vec::with_capacity(depth);
    if depth >= 1 {
        stages.push(vec![fan.clone()]);
    }
    if depth >= 2 {
        let q = fan.resampled(QUINCUNX);
        stages.push(vec![q.clone(), q]);
    }
    if depth >= 3 {
        let base = [
            diamond.modulated(true),
            diamond.modulated(false),
            diamond.modulated(true).transposed(),
            diamond.modulated(false).transposed(),
        ];
        let para: Vec<FilterKernel2D> = base.iter().zip(SHEARS).map(|(k, s)| k.resampled(s)).collect();
        for level in 3..=depth {
            let half = 1usize << (level - 2);
            let scale = 1isize << (level - 3);
            let mut kernels = Vec::with_capacity(2 * half);
            for k in 0..2 * half {
                let (m, which) = if k < half {
                    let s = 2 * (k as isize / 2) - scale + 1;
                    (mat_mul([[2 * scale, 0], [0, 2]], [[1, 0], [-s, 1]]), k % 2)
                } else {
                    let s = 2 * ((k - half) as isize / 2) - scale + 1;
                    (mat_mul([[2, 0], [0, 2 * scale]], [[1, -s], [0, 1]]), k % 2 + 2)
                };
                kernels.push(para[which].resampled(m));
            }
            stages.push(kernels);
        }
    }
    stages
}

pub(crate) fn check_directions(directions: usize) -> Result<usize> {
    if directions < 2 || !directions.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("direction count must be a power of two >= 2, got {directions}")));
    }
    Ok(directions.trailing_zeros() as usize)
}

/// Splits `band` into `directions` same-size directional subbands whose sum is `band`.
pub fn nsdfb_decompose(band: &BandImage, directions: usize, boundary: BoundaryMode) -> Result<Vec<BandImage>> {
    let depth = check_directions(directions)?;
    let stages = nsdfb_kernels(depth);
    let mut nodes = vec![band.clone()];
    for kernels in &stages {
        nodes = nodes
            .par_iter()
            .zip(kernels.par_iter())
            .flat_map_iter(|(node, kernel)| {
                let low = filter2d(node, kernel, boundary);
                let rest: Vec<f64> = node.data().iter().zip(low.data()).map(|(x, l)| x - l).collect();
                let rest = BandImage::from_parts(node.width(), node.height(), rest);
                [low, rest]
            })
            .collect();
    }
    Ok(nodes)
}

/// Inverse of [`nsdfb_decompose`]: the sum of the subbands.
pub fn nsdfb_reconstruct(subbands: &[BandImage]) -> Result<BandImage> {
    let first = subbands.first().ok_or_else(|| Error::InvalidParameter("no directional subbands".into()))?;
    let mut acc = vec![0.0; first.len()];
    for s in subbands {
        first.check_same_dims(s, "directional reconstruction")?;
        for (a, v) in acc.iter_mut().zip(s.data()) {
            *a += v;
        }
    }
    Ok(BandImage::from_parts(first.width(), first.height(), acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn diamond_response_at_key_points() {
        let d = diamond_kernel();
        assert!((d.response(0.0, 0.0).0 - 1.0).abs() < 1e-15);
        assert!(d.response(PI, PI).0.abs() < 1e-15);
        // diamond edge
        assert!((d.response(PI, 0.0).0 - 0.5).abs() < 1e-15);
        assert!((d.response(PI / 2.0, PI / 2.0).0 - 0.5).abs() < 1e-15);
        assert!((d.tap_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fan_splits_dc_evenly() {
        assert!((fan_kernel().response(0.0, 0.0).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stage_counts() {
        let k = nsdfb_kernels(4);
        assert_eq!(k.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let b = BandImage::filled(8, 8, 1.0).unwrap();
        for bad in [0, 1, 3, 6] {
            assert!(nsdfb_decompose(&b, bad, BoundaryMode::Symmetric).is_err());
        }
    }
}
