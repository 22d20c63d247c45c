//! Grid expansion (MS to PAN pixel size) and lowpass degradation.
//!
//! Both operations use a corner-aligned lattice: low-resolution sample `i`
//! sits on high-resolution sample `i * ratio`. Decimation picks exactly those
//! samples, so expanding and then degrading returns the original lattice.

use serde::{Deserialize, Serialize};

use super::{BandImage, MultiBandImage};
use crate::error::{Error, Result};
use crate::nsct::{pyramid_lowpass, BoundaryMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    #[default]
    Bilinear,
    Bicubic,
}

/// Keys cubic convolution weights for taps at offsets -1, 0, 1, 2.
fn keys_weights(t: f64) -> [f64; 4] {
    const A: f64 = -0.5;
    let near = |x: f64| ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0;
    let far = |x: f64| ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A;
    [far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)]
}

/// Interpolates one line of `n` samples (read through `at`) onto `n * ratio` points.
/// Written as `base + sum(w * (v - base))` so constant lines stay bit-exact.
fn expand_line(n: usize, ratio: usize, kernel: Interpolation, at: impl Fn(usize) -> f64, out: &mut [f64]) {
    let clamp = |i: isize| i.clamp(0, n as isize - 1) as usize;
    for (o, slot) in out.iter_mut().enumerate() {
        let i0 = o / ratio;
        let t = (o % ratio) as f64 / ratio as f64;
        let base = at(i0);
        *slot = match kernel {
            Interpolation::Bilinear => {
                let next = at(clamp(i0 as isize + 1));
                base + t * (next - base)
            }
            Interpolation::Bicubic => {
                let w = keys_weights(t);
                let mut acc = 0.0;
                for (k, wk) in w.iter().enumerate() {
                    acc += wk * (at(clamp(i0 as isize + k as isize - 1)) - base);
                }
                base + acc
            }
        };
    }
}

pub fn expand(band: &BandImage, ratio: usize, kernel: Interpolation) -> Result<BandImage> {
    if ratio < 1 {
        return Err(Error::InvalidParameter(format!("expansion ratio must be >= 1, got {ratio}")));
    }
    if ratio == 1 {
        return Ok(band.clone());
    }
    let (w, h) = band.dims();
    let (ow, oh) = (w * ratio, h * ratio);

    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let src = band.row(y);
        expand_line(w, ratio, kernel, |i| src[i], &mut rows[y * ow..(y + 1) * ow]);
    }
    let mut out = vec![0.0; ow * oh];
    let mut col = vec![0.0; oh];
    for x in 0..ow {
        expand_line(h, ratio, kernel, |i| rows[i * ow + x], &mut col);
        for (y, v) in col.iter().enumerate() {
            out[y * ow + x] = *v;
        }
    }
    BandImage::new(ow, oh, out)
}

/// Number of pyramid lowpass passes used to band-limit before decimating by `ratio`.
pub(crate) fn degrade_passes(ratio: usize) -> usize {
    ratio.next_power_of_two().trailing_zeros() as usize
}

/// Lowpass filters with the à trous cascade and keeps every `ratio`-th sample.
pub fn degrade(band: &BandImage, ratio: usize) -> Result<BandImage> {
    if ratio < 1 {
        return Err(Error::InvalidParameter(format!("degradation ratio must be >= 1, got {ratio}")));
    }
    let (w, h) = band.dims();
    if w % ratio != 0 || h % ratio != 0 {
        return Err(Error::DimensionMismatch(format!("{w}x{h} is not divisible by ratio {ratio}")));
    }
    if ratio == 1 {
        return Ok(band.clone());
    }
    let mut smooth = band.clone();
    for level in 0..degrade_passes(ratio) {
        smooth = pyramid_lowpass(&smooth, level, BoundaryMode::Symmetric);
    }
    let (ow, oh) = (w / ratio, h / ratio);
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let row = smooth.row(y * ratio);
        out.extend((0..ow).map(|x| row[x * ratio]));
    }
    Ok(BandImage::from_parts(ow, oh, out))
}

pub fn expand_multiband(ms: &MultiBandImage, ratio: usize, kernel: Interpolation) -> Result<MultiBandImage> {
    ms.map_bands(|b| expand(b, ratio, kernel))
}

pub fn degrade_multiband(ms: &MultiBandImage, ratio: usize) -> Result<MultiBandImage> {
    ms.map_bands(|b| degrade(b, ratio))
}
