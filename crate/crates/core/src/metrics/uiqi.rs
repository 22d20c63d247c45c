//! Universal image quality index, globally or averaged over square windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moments::MomentSummary;
use crate::error::{Error, Result};
use crate::raster::BandImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "window")]
pub enum UiqiMode {
    /// One index over the whole image.
    Global,
    /// Average over every fully contained `w × w` window, stride 1.
    Sliding(usize),
    /// Average over non-overlapping `w × w` blocks; partial edge blocks are dropped.
    Blocks(usize),
}

/// Top-left corners of the windows visited for a `width × height` image.
pub(crate) fn window_origins(width: usize, height: usize, window: usize, stride: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut y = 0;
    while y + window <= height {
        let mut x = 0;
        while x + window <= width {
            out.push((x, y));
            x += stride;
        }
        y += stride;
    }
    out
}

pub(crate) fn gather(band: &BandImage, x0: usize, y0: usize, window: usize, buf: &mut Vec<f64>) {
    buf.clear();
    for y in y0..y0 + window {
        buf.extend_from_slice(&band.row(y)[x0..x0 + window]);
    }
}

pub(crate) fn check_window(window: usize, width: usize, height: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::InvalidParameter(format!("window must be >= 2, got {window}")));
    }
    if window > width.min(height) {
        return Err(Error::InvalidParameter(format!("window {window} larger than {width}x{height} image")));
    }
    Ok(())
}

pub fn uiqi(a: &BandImage, b: &BandImage, mode: UiqiMode) -> Result<f64> {
    a.check_same_dims(b, "uiqi")?;
    let (window, stride) = match mode {
        UiqiMode::Global => return Ok(MomentSummary::compute(a.data(), b.data())?.uiqi()),
        UiqiMode::Sliding(w) => (w, 1),
        UiqiMode::Blocks(w) => (w, w),
    };
    check_window(window, a.width(), a.height())?;
    let origins = window_origins(a.width(), a.height(), window, stride);
    let scores: Vec<f64> = origins
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(ba, bb), &(x, y)| {
                gather(a, x, y, window, ba);
                gather(b, x, y, window, bb);
                MomentSummary::compute(ba, bb).map(|m| m.uiqi()).unwrap_or(0.0)
            },
        )
        .collect();
    // ordered sum keeps the result independent of thread scheduling
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
