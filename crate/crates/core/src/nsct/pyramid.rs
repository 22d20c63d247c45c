//! Nonsubsampled pyramid in additive (à trous) form.
//!
//! Stage `k` smooths with the separable `[1, 4, 6, 4, 1] / 16` kernel dilated by
//! `2^k`; the bandpass output is the stage input minus its smoothed version, so
//! summing all outputs returns the input.

use super::filter::{pad, BoundaryMode, FilterKernel2D};
use crate::error::{Error, Result};
use crate::raster::BandImage;

pub const SPLINE_TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Lowpass and identity-complement highpass kernels for pyramid stage `level`.
pub fn pyramid_filters(level: usize) -> (FilterKernel2D, FilterKernel2D) {
    let dilation = 1usize << level;
    let low = FilterKernel2D::separable(&SPLINE_TAPS, dilation).expect("fixed taps are valid");
    let high = low.complement().with_dilation(1).expect("complement is undilated");
    (low, high)
}

#[inline]
fn avg(a: f64, b: f64) -> f64 {
    (a + b) * 0.5
}

/// `[1, 2, 1] / 4` along a strided line, valid mode: reads `n + 2d` samples, writes `n`.
/// Built from pairwise averages so constants pass through bit-exactly.
#[inline]
fn smooth121(src: &[f64], d: usize, stride: usize, n: usize, dst: &mut [f64], dst_stride: usize) {
    for i in 0..n {
        let a = src[i * stride];
        let b = src[(i + d) * stride];
        let c = src[(i + 2 * d) * stride];
        dst[i * dst_stride] = avg(avg(a, b), avg(b, c));
    }
}

/// Applies the stage-`level` pyramid lowpass. Equivalent to filtering with
/// `pyramid_filters(level).0`; `[1,4,6,4,1]/16` is computed as two `[1,2,1]/4` passes.
pub fn pyramid_lowpass(band: &BandImage, level: usize, boundary: BoundaryMode) -> BandImage {
    let d = 1usize << level;
    let (w, h) = band.dims();
    let m = 2 * d;
    let padded = pad(band, m, m, m, m, boundary);
    let pw = w + 2 * m;
    let ph = h + 2 * m;

    // horizontal: pw -> pw - 2d -> w, over every padded row
    let mid_w = pw - 2 * d;
    let mut mid = vec![0.0; mid_w];
    let mut horiz = vec![0.0; w * ph];
    for y in 0..ph {
        let row = &padded[y * pw..(y + 1) * pw];
        smooth121(row, d, 1, mid_w, &mut mid, 1);
        smooth121(&mid, d, 1, w, &mut horiz[y * w..(y + 1) * w], 1);
    }

    // vertical: ph -> ph - 2d -> h
    let mid_h = ph - 2 * d;
    let mut col_mid = vec![0.0; mid_h];
    let mut out = vec![0.0; w * h];
    for x in 0..w {
        smooth121(&horiz[x..], d, w, mid_h, &mut col_mid, 1);
        smooth121(&col_mid, d, 1, h, &mut out[x..], w);
    }
    BandImage::from_parts(w, h, out)
}

/// Splits `band` into a lowpass residual and `levels` bandpass images, finest first.
pub fn nsp_decompose(band: &BandImage, levels: usize, boundary: BoundaryMode) -> Result<(BandImage, Vec<BandImage>)> {
    if levels < 1 {
        return Err(Error::InvalidParameter("pyramid needs at least one level".into()));
    }
    let mut current = band.clone();
    let mut bandpass = Vec::with_capacity(levels);
    for level in 0..levels {
        let low = pyramid_lowpass(&current, level, boundary);
        let detail: Vec<f64> = current.data().iter().zip(low.data()).map(|(c, l)| c - l).collect();
        bandpass.push(BandImage::from_parts(band.width(), band.height(), detail));
        current = low;
    }
    Ok((current, bandpass))
}

/// Inverse of [`nsp_decompose`]: the lowpass plus every bandpass image.
pub fn nsp_reconstruct(lowpass: &BandImage, bandpass: &[BandImage]) -> Result<BandImage> {
    let mut acc = lowpass.data().to_vec();
    for b in bandpass {
        lowpass.check_same_dims(b, "pyramid reconstruction")?;
        for (a, v) in acc.iter_mut().zip(b.data()) {
            *a += v;
        }
    }
    Ok(BandImage::from_parts(lowpass.width(), lowpass.height(), acc))
}
