//! Dense 2-D filter kernels on a dilated tap lattice, and boundary-extended filtering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BandImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Half-sample mirror: `x[-1] = x[0]`, `x[-2] = x[1]`, ...
    #[default]
    Symmetric,
    Periodic,
    Zero,
}

impl BoundaryMode {
    /// Maps a possibly out-of-range index onto `0..n`, or `None` for zero padding.
    #[inline]
    pub fn resolve(self, i: isize, n: usize) -> Option<usize> {
        let n = n as isize;
        if (0..n).contains(&i) {
            return Some(i as usize);
        }
        match self {
            BoundaryMode::Zero => None,
            BoundaryMode::Periodic => Some(i.rem_euclid(n) as usize),
            BoundaryMode::Symmetric => {
                let m = i.rem_euclid(2 * n);
                Some(if m < n { m } else { 2 * n - 1 - m } as usize)
            }
        }
    }
}

/// A grid of taps. Tap `(r, c)` sits at offset `((r - anchor.0) * dilation, (c - anchor.1) * dilation)`
/// from the output pixel, rows first.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel2D {
    taps: Vec<f64>,
    rows: usize,
    cols: usize,
    anchor: (usize, usize),
    dilation: usize,
}

impl FilterKernel2D {
    pub fn new(taps: Vec<f64>, rows: usize, cols: usize, anchor: (usize, usize), dilation: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || taps.len() != rows * cols {
            return Err(Error::InvalidParameter(format!("kernel grid {rows}x{cols} with {} taps", taps.len())));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("non-finite kernel tap".into()));
        }
        if anchor.0 >= rows || anchor.1 >= cols {
            return Err(Error::InvalidParameter(format!("anchor {anchor:?} outside {rows}x{cols} grid")));
        }
        if dilation == 0 {
            return Err(Error::InvalidParameter("kernel dilation must be >= 1".into()));
        }
        Ok(Self { taps, rows, cols, anchor, dilation })
    }

    /// Separable kernel `column ⊗ row`, anchored at the centre of each 1-D filter.
    pub fn separable(row: &[f64], dilation: usize) -> Result<Self> {
        let n = row.len();
        let taps = row.iter().flat_map(|a| row.iter().map(move |b| a * b)).collect();
        Self::new(taps, n, n, (n / 2, n / 2), dilation)
    }

    /// Builds the smallest undilated grid holding the given `(dy, dx, weight)` taps.
    /// Repeated offsets accumulate.
    pub fn from_offsets(offsets: &[(isize, isize, f64)]) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidParameter("kernel needs at least one tap".into()));
        }
        let (min_y, max_y) = offsets.iter().fold((0, 0), |(a, b), t| (a.min(t.0), b.max(t.0)));
        let (min_x, max_x) = offsets.iter().fold((0, 0), |(a, b), t| (a.min(t.1), b.max(t.1)));
        let rows = (max_y - min_y + 1) as usize;
        let cols = (max_x - min_x + 1) as usize;
        let mut taps = vec![0.0; rows * cols];
        for &(dy, dx, w) in offsets {
            taps[(dy - min_y) as usize * cols + (dx - min_x) as usize] += w;
        }
        Self::new(taps, rows, cols, ((-min_y) as usize, (-min_x) as usize), 1)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn dilation(&self) -> usize {
        self.dilation
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn tap_sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// Effective `(rows, cols)` extent once dilation is applied.
    pub fn support(&self) -> (usize, usize) {
        ((self.rows - 1) * self.dilation + 1, (self.cols - 1) * self.dilation + 1)
    }

    /// Non-zero taps as `(dy, dx, weight)` offsets.
    pub fn offsets(&self) -> Vec<(isize, isize, f64)> {
        let d = self.dilation as isize;
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let w = self.taps[r * self.cols + c];
                if w != 0.0 {
                    out.push(((r as isize - self.anchor.0 as isize) * d, (c as isize - self.anchor.1 as isize) * d, w));
                }
            }
        }
        out
    }

    pub fn with_dilation(&self, dilation: usize) -> Result<Self> {
        Self::new(self.taps.clone(), self.rows, self.cols, self.anchor, dilation)
    }

    /// Moves every tap from offset `n` to `m · n` (integer lattice resampling).
    pub fn resampled(&self, m: [[isize; 2]; 2]) -> Self {
        let moved: Vec<_> = self
            .offsets()
            .into_iter()
            .map(|(dy, dx, w)| (m[0][0] * dy + m[0][1] * dx, m[1][0] * dy + m[1][1] * dx, w))
            .collect();
        Self::from_offsets(&moved).expect("resampling keeps taps")
    }

    /// Multiplies taps by `(-1)^dy` (`rows == true`) or `(-1)^dx`: a half-period
    /// frequency shift along that axis.
    pub fn modulated(&self, rows: bool) -> Self {
        let moved: Vec<_> = self
            .offsets()
            .into_iter()
            .map(|(dy, dx, w)| {
                let k = if rows { dy } else { dx };
                (dy, dx, if k.rem_euclid(2) == 1 { -w } else { w })
            })
            .collect();
        Self::from_offsets(&moved).expect("modulation keeps taps")
    }

    pub fn transposed(&self) -> Self {
        let moved: Vec<_> = self.offsets().into_iter().map(|(dy, dx, w)| (dx, dy, w)).collect();
        Self::from_offsets(&moved).expect("transpose keeps taps")
    }

    /// `δ − h`.
    pub fn complement(&self) -> Self {
        let mut moved: Vec<_> = self.offsets().into_iter().map(|(dy, dx, w)| (dy, dx, -w)).collect();
        moved.push((0, 0, 1.0));
        Self::from_offsets(&moved).expect("complement keeps taps")
    }

    /// Real part of the frequency response at `(w_rows, w_cols)` radians/sample.
    pub fn response(&self, w_rows: f64, w_cols: f64) -> (f64, f64) {
        self.offsets().iter().fold((0.0, 0.0), |(re, im), &(dy, dx, w)| {
            let phase = -(w_rows * dy as f64 + w_cols * dx as f64);
            (re + w * phase.cos(), im + w * phase.sin())
        })
    }
}

/// Correlates `band` with `kernel`: `out(y, x) = Σ w · in(y + dy, x + dx)`.
/// Every kernel built in this crate is point-symmetric, so this is also convolution.
pub fn filter2d(band: &BandImage, kernel: &FilterKernel2D, boundary: BoundaryMode) -> BandImage {
    let taps = kernel.offsets();
    let (w, h) = band.dims();
    if taps.is_empty() {
        return BandImage::from_parts(w, h, vec![0.0; w * h]);
    }
    let top = taps.iter().map(|t| -t.0).max().unwrap().max(0) as usize;
    let bottom = taps.iter().map(|t| t.0).max().unwrap().max(0) as usize;
    let left = taps.iter().map(|t| -t.1).max().unwrap().max(0) as usize;
    let right = taps.iter().map(|t| t.1).max().unwrap().max(0) as usize;
    let padded = pad(band, top, bottom, left, right, boundary);
    let pw = w + left + right;

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for &(dy, dx, wt) in &taps {
            let sy = (y + top) as isize + dy;
            let sx = left as isize + dx;
            let start = sy as usize * pw + sx as usize;
            for (o, s) in dst.iter_mut().zip(&padded[start..start + w]) {
                *o += wt * s;
            }
        }
    }
    BandImage::from_parts(w, h, out)
}

/// Extends a band by the given margins. Returns the padded samples, row-major,
/// `(w + left + right)` wide.
pub(crate) fn pad(
    band: &BandImage,
    top: usize,
    bottom: usize,
    left: usize,
    right: usize,
    mode: BoundaryMode,
) -> Vec<f64> {
    let (w, h) = band.dims();
    let pw = w + left + right;
    let ph = h + top + bottom;
    let cols: Vec<Option<usize>> = (0..pw).map(|x| mode.resolve(x as isize - left as isize, w)).collect();
    let mut out = vec![0.0; pw * ph];
    for y in 0..ph {
        let Some(sy) = mode.resolve(y as isize - top as isize, h) else { continue };
        let src = band.row(sy);
        let dst = &mut out[y * pw..(y + 1) * pw];
        for (d, c) in dst.iter_mut().zip(&cols) {
            if let Some(c) = c {
                *d = src[*c];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_resolution() {
        let s = BoundaryMode::Symmetric;
        assert_eq!(s.resolve(-1, 4), Some(0));
        assert_eq!(s.resolve(-2, 4), Some(1));
        assert_eq!(s.resolve(4, 4), Some(3));
        assert_eq!(s.resolve(9, 4), Some(1));
        assert_eq!(s.resolve(-7, 1), Some(0));
        assert_eq!(BoundaryMode::Periodic.resolve(-1, 4), Some(3));
        assert_eq!(BoundaryMode::Periodic.resolve(9, 4), Some(1));
        assert_eq!(BoundaryMode::Zero.resolve(-1, 4), None);
    }

    #[test]
    fn support_formula() {
        let k = FilterKernel2D::separable(&[1.0, 4.0, 6.0, 4.0, 1.0], 4).unwrap();
        assert_eq!(k.support(), (17, 17));
        assert!(FilterKernel2D::new(vec![1.0], 1, 1, (0, 0), 0).is_err());
        assert!(FilterKernel2D::new(vec![], 0, 0, (0, 0), 1).is_err());
    }

    #[test]
    fn lattice_ops() {
        let k = FilterKernel2D::from_offsets(&[(0, 0, 2.0), (1, 0, 1.0), (0, 1, 3.0)]).unwrap();
        let t = k.transposed();
        assert!(t.offsets().contains(&(1, 0, 3.0)));
        let r = k.resampled([[1, 1], [0, 1]]);
        assert!(r.offsets().contains(&(1, 1, 3.0)));
        let m = k.modulated(true);
        assert!(m.offsets().contains(&(1, 0, -1.0)));
        let c = k.complement();
        assert!(c.offsets().contains(&(0, 0, -1.0)));
        assert_eq!(c.tap_sum(), 1.0 - k.tap_sum());
    }

    #[test]
    fn identity_kernel_is_identity() {
        let b = BandImage::from_fn(5, 4, |x, y| (x * 3 + y) as f64).unwrap();
        let id = FilterKernel2D::from_offsets(&[(0, 0, 1.0)]).unwrap();
        for mode in [BoundaryMode::Symmetric, BoundaryMode::Periodic, BoundaryMode::Zero] {
            assert_eq!(filter2d(&b, &id, mode), b);
        }
        let shift = FilterKernel2D::from_offsets(&[(0, -1, 1.0)]).unwrap();
        assert_eq!(filter2d(&b, &shift, BoundaryMode::Periodic), b.shifted(1, 0));
    }
}
