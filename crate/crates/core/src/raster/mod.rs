//! Band rasters, file I/O, resampling and histograms.

mod histogram;
mod manifest;
mod pgm;
mod resample;

pub use histogram::{histogram, histogram_in_range, Histogram};
pub use manifest::{load_multiband, load_scene, write_manifest, BandEntry, Manifest, PanEntry, Scene};
pub use pgm::{clip_round, read_pgm, save_band, write_pgm};
pub use resample::{degrade, degrade_multiband, expand, expand_multiband, Interpolation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One spectral band on a regular grid, samples stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBand")]
pub struct BandImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBand {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl TryFrom<RawBand> for BandImage {
    type Error = Error;

    fn try_from(raw: RawBand) -> Result<Self> {
        BandImage::new(raw.width, raw.height, raw.data)
    }
}

impl BandImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!("band dimensions must be positive, got {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!("{} samples for a {width}x{height} band", data.len())));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at index {i}")));
        }
        Ok(Self { width, height, data })
    }

    /// Builds a band without re-checking finiteness. Callers guarantee the invariants.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_dims(&self, other: &BandImage) -> bool {
        self.dims() == other.dims()
    }

    pub(crate) fn check_same_dims(&self, other: &BandImage, what: &str) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    /// Applies `f` to every sample. Non-finite results are rejected.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &BandImage, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_dims(other, "zip_map")?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.width, self.height, data)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn max_abs_diff(&self, other: &BandImage) -> Result<f64> {
        self.check_same_dims(other, "max_abs_diff")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Circular shift by `(dx, dy)`: output(x, y) = input(x - dx, y - dy) modulo the grid.
    pub fn shifted(&self, dx: isize, dy: isize) -> Self {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = vec![0.0; self.data.len()];
        for y in 0..h {
            let sy = (y - dy).rem_euclid(h);
            for x in 0..w {
                let sx = (x - dx).rem_euclid(w);
                out[(y * w + x) as usize] = self.data[(sy * w + sx) as usize];
            }
        }
        Self::from_parts(self.width, self.height, out)
    }

    pub fn transposed(&self) -> Self {
        let mut out = vec![0.0; self.data.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.data[y * self.width + x];
            }
        }
        Self::from_parts(self.height, self.width, out)
    }
}

/// N co-registered bands of identical dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiBandImage {
    bands: Vec<BandImage>,
    names: Option<Vec<String>>,
}

impl MultiBandImage {
    pub fn new(bands: Vec<BandImage>) -> Result<Self> {
        let first =
            bands.first().ok_or_else(|| Error::InvalidParameter("multiband image needs at least one band".into()))?;
        for (i, b) in bands.iter().enumerate().skip(1) {
            if !b.same_dims(first) {
                return Err(Error::DimensionMismatch(format!(
                    "band {i} is {}x{}, band 0 is {}x{}",
                    b.width(),
                    b.height(),
                    first.width(),
                    first.height()
                )));
            }
        }
        Ok(Self { bands, names: None })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.bands.len() {
            return Err(Error::InvalidParameter(format!("{} names for {} bands", names.len(), self.bands.len())));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn bands(&self) -> &[BandImage] {
        &self.bands
    }

    pub fn into_bands(self) -> Vec<BandImage> {
        self.bands
    }

    pub fn band(&self, i: usize) -> &BandImage {
        &self.bands[i]
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn width(&self) -> usize {
        self.bands[0].width()
    }

    pub fn height(&self) -> usize {
        self.bands[0].height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.bands[0].dims()
    }

    pub(crate) fn check_same_shape(&self, other: &MultiBandImage, what: &str) -> Result<()> {
        if self.band_count() != other.band_count() {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {} bands vs {} bands",
                self.band_count(),
                other.band_count()
            )));
        }
        self.bands[0].check_same_dims(&other.bands[0], what)
    }

    /// Per-pixel average over bands.
    pub fn band_mean(&self) -> BandImage {
        let n = self.bands.len() as f64;
        let mut acc = vec![0.0; self.bands[0].len()];
        for b in &self.bands {
            for (a, v) in acc.iter_mut().zip(b.data()) {
                *a += v;
            }
        }
        acc.iter_mut().for_each(|a| *a /= n);
        BandImage::from_parts(self.width(), self.height(), acc)
    }

    pub fn map_bands(&self, f: impl FnMut(&BandImage) -> Result<BandImage>) -> Result<Self> {
        let bands = self.bands.iter().map(f).collect::<Result<Vec<_>>>()?;
        let out = MultiBandImage::new(bands)?;
        Ok(Self { names: self.names.clone(), ..out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert!(BandImage::new(0, 3, vec![]).is_err());
        assert!(BandImage::new(2, 2, vec![0.0; 3]).is_err());
        assert!(BandImage::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn multiband_requires_common_dims() {
        let a = BandImage::filled(4, 4, 1.0).unwrap();
        let b = BandImage::filled(2, 2, 1.0).unwrap();
        assert!(matches!(MultiBandImage::new(vec![a.clone(), b]), Err(Error::DimensionMismatch(_))));
        assert!(MultiBandImage::new(vec![]).is_err());
        assert_eq!(MultiBandImage::new(vec![a]).unwrap().band_count(), 1);
    }

    #[test]
    fn shift_wraps_around() {
        let b = BandImage::from_fn(3, 2, |x, y| (y * 3 + x) as f64).unwrap();
        let s = b.shifted(1, 0);
        assert_eq!(s.row(0), &[2.0, 0.0, 1.0]);
        assert_eq!(s.shifted(-1, 0), b);
        assert_eq!(b.shifted(0, 1).row(0), b.row(1));
    }
}
