//! Shift-invariant nonsubsampled contourlet transform: an additive à trous
//! pyramid whose bandpass images are further split by a nonsubsampled
//! directional filter bank. Nothing is decimated; every band keeps the source
//! dimensions and reconstruction is a plain sum.

mod dfb;
mod filter;
mod pyramid;

pub use dfb::{diamond_kernel, fan_kernel, nsdfb_decompose, nsdfb_kernels, nsdfb_reconstruct};
pub use filter::{filter2d, BoundaryMode, FilterKernel2D};
pub use pyramid::{nsp_decompose, nsp_reconstruct, pyramid_filters, pyramid_lowpass, SPLINE_TAPS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BandImage;

/// Max-abs reconstruction error accepted for decompose → reconstruct.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-6;
/// Max-abs deviation accepted when checking linearity of the transform.
pub const LINEARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsctConfig {
    pub levels: usize,
    /// Direction count per pyramid level, finest level first. `1` disables the
    /// directional split at that level.
    pub directions: Vec<usize>,
    #[serde(default)]
    pub boundary: BoundaryMode,
}

impl Default for NsctConfig {
    fn default() -> Self {
        Self { levels: 2, directions: vec![8, 8], boundary: BoundaryMode::Symmetric }
    }
}

impl NsctConfig {
    pub fn new(directions: Vec<usize>, boundary: BoundaryMode) -> Result<Self> {
        let cfg = Self { levels: directions.len(), directions, boundary };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 1 {
            return Err(Error::Config("nsct levels must be >= 1".into()));
        }
        if self.directions.len() != self.levels {
            return Err(Error::Config(format!(
                "{} direction counts for {} levels",
                self.directions.len(),
                self.levels
            )));
        }
        if let Some(bad) = self.directions.iter().find(|d| ![1, 2, 4, 8, 16].contains(*d)) {
            return Err(Error::Config(format!("direction count {bad} not in {{1, 2, 4, 8, 16}}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsctDecomposition {
    pub lowpass: BandImage,
    /// `details[level][direction]`, finest level first.
    pub details: Vec<Vec<BandImage>>,
    pub config: NsctConfig,
    pub source_dims: (usize, usize),
}

impl NsctDecomposition {
    pub fn bands(&self) -> impl Iterator<Item = &BandImage> {
        std::iter::once(&self.lowpass).chain(self.details.iter().flatten())
    }

    pub fn band_count(&self) -> usize {
        1 + self.details.iter().map(Vec::len).sum::<usize>()
    }

    fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.details.len() != self.config.levels {
            return Err(Error::DimensionMismatch(format!(
                "{} detail levels for a {}-level config",
                self.details.len(),
                self.config.levels
            )));
        }
        for (k, (level, &dirs)) in self.details.iter().zip(&self.config.directions).enumerate() {
            if level.len() != dirs {
                return Err(Error::DimensionMismatch(format!(
                    "level {k} has {} subbands, config expects {dirs}",
                    level.len()
                )));
            }
        }
        if let Some(b) = self.bands().find(|b| b.dims() != self.source_dims) {
            return Err(Error::DimensionMismatch(format!(
                "band is {}x{}, decomposition source is {}x{}",
                b.width(),
                b.height(),
                self.source_dims.0,
                self.source_dims.1
            )));
        }
        Ok(())
    }
}

pub fn nsct_decompose(band: &BandImage, config: &NsctConfig) -> Result<NsctDecomposition> {
    config.validate()?;
    let (lowpass, bandpass) = nsp_decompose(band, config.levels, config.boundary)?;
    let details = bandpass
        .into_par_iter()
        .zip(config.directions.par_iter())
        .map(|(bp, &dirs)| if dirs == 1 { Ok(vec![bp]) } else { nsdfb_decompose(&bp, dirs, config.boundary) })
        .collect::<Result<Vec<_>>>()?;
    Ok(NsctDecomposition { lowpass, details, config: config.clone(), source_dims: band.dims() })
}

pub fn nsct_reconstruct(decomp: &NsctDecomposition) -> Result<BandImage> {
    decomp.validate()?;
    let levels = decomp.details.iter().map(|subbands| nsdfb_reconstruct(subbands)).collect::<Result<Vec<_>>>()?;
    nsp_reconstruct(&decomp.lowpass, &levels)
}

/// Keeps `target`'s lowpass and takes every detail band from `source`.
pub fn replace_details(target: &NsctDecomposition, source: &NsctDecomposition) -> Result<NsctDecomposition> {
    if target.config != source.config {
        return Err(Error::Config("cannot mix decompositions with different configs".into()));
    }
    if target.source_dims != source.source_dims {
        return Err(Error::DimensionMismatch(format!(
            "decompositions of {:?} and {:?} images",
            target.source_dims, source.source_dims
        )));
    }
    Ok(NsctDecomposition {
        lowpass: target.lowpass.clone(),
        details: source.details.clone(),
        config: target.config.clone(),
        source_dims: target.source_dims,
    })
}
