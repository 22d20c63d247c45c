//! Quality with no reference: spectral distortion `D_λ` from inter-band
//! quality changes, spatial distortion `D_s` from band-to-PAN quality changes
//! across scales, combined as `(1 - D_λ)^α (1 - D_s)^β`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::uiqi::{uiqi, UiqiMode};
use crate::error::{Error, Result};
use crate::raster::{degrade, BandImage, MultiBandImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QnrConfig {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    /// Block size of the windowed quality index (stride equals the block size).
    pub window: usize,
    pub ratio: usize,
}

impl Default for QnrConfig {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, p: 1.0, q: 1.0, window: 32, ratio: 4 }
    }
}

impl QnrConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("p", self.p), ("q", self.q)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("qnr {name} must be positive, got {v}")));
            }
        }
        if self.window < 2 {
            return Err(Error::Config(format!("qnr window must be >= 2, got {}", self.window)));
        }
        if self.ratio < 1 {
            return Err(Error::Config("qnr ratio must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QnrScore {
    pub qnr: f64,
    pub d_lambda: f64,
    pub d_s: f64,
}

/// Windowed quality index with blocks capped at the image's shorter side.
fn block_q(a: &BandImage, b: &BandImage, window: usize) -> Result<f64> {
    let w = window.min(a.width()).min(a.height());
    if w < 2 {
        return uiqi(a, b, UiqiMode::Global);
    }
    uiqi(a, b, UiqiMode::Blocks(w))
}

fn mean_power(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64;
    m.powf(1.0 / p)
}

pub fn d_lambda(fused: &MultiBandImage, ms_original: &MultiBandImage, config: &QnrConfig) -> Result<f64> {
    let n = fused.band_count();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let diffs = pairs
        .par_iter()
        .map(|&(i, j)| {
            let low = block_q(ms_original.band(i), ms_original.band(j), config.window)?;
            let high = block_q(fused.band(i), fused.band(j), config.window)?;
            Ok(low - high)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_power(&diffs, config.p).min(1.0))
}

pub fn d_s(fused: &MultiBandImage, ms_original: &MultiBandImage, pan: &BandImage, config: &QnrConfig) -> Result<f64> {
    let pan_low = degrade(pan, config.ratio)?;
    let diffs = (0..fused.band_count())
        .into_par_iter()
        .map(|i| {
            let high = block_q(fused.band(i), pan, config.window)?;
            let low = block_q(ms_original.band(i), &pan_low, config.window)?;
            Ok(high - low)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_power(&diffs, config.q).min(1.0))
}

pub fn qnr(
    fused: &MultiBandImage,
    ms_original: &MultiBandImage,
    pan: &BandImage,
    config: &QnrConfig,
) -> Result<QnrScore> {
    config.validate()?;
    if fused.band_count() != ms_original.band_count() {
        return Err(Error::DimensionMismatch(format!(
            "fused has {} bands, original MS has {}",
            fused.band_count(),
            ms_original.band_count()
        )));
    }
    fused.band(0).check_same_dims(pan, "qnr fused vs pan")?;
    let (w, h) = pan.dims();
    if ms_original.dims() != (w / config.ratio, h / config.ratio) || w % config.ratio != 0 || h % config.ratio != 0 {
        return Err(Error::DimensionMismatch(format!(
            "original MS is {}x{}, expected pan {w}x{h} / ratio {}",
            ms_original.width(),
            ms_original.height(),
            config.ratio
        )));
    }
    let d_lambda = d_lambda(fused, ms_original, config)?;
    let d_s = d_s(fused, ms_original, pan, config)?;
    let qnr = (1.0 - d_lambda).powf(config.alpha) * (1.0 - d_s).powf(config.beta);
    Ok(QnrScore { qnr, d_lambda, d_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ms(seed: u64, n: usize, size: usize) -> MultiBandImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MultiBandImage::new(
            (0..n).map(|_| BandImage::from_fn(size, size, |_, _| rng.random_range(20.0..220.0)).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn perfect_at_ratio_one() {
        let m = ms(1, 3, 16);
        let pan = ms(2, 1, 16).band(0).clone();
        let cfg = QnrConfig { window: 8, ratio: 1, ..Default::default() };
        let s = qnr(&m, &m, &pan, &cfg).unwrap();
        assert_eq!((s.qnr, s.d_lambda, s.d_s), (1.0, 0.0, 0.0));
    }

    #[test]
    fn single_band_has_no_spectral_term() {
        let m = ms(3, 1, 8);
        let fused = ms(4, 1, 16);
        let pan = ms(5, 1, 16).band(0).clone();
        let cfg = QnrConfig { window: 4, ratio: 2, ..Default::default() };
        let s = qnr(&fused, &m, &pan, &cfg).unwrap();
        assert_eq!(s.d_lambda, 0.0);
        assert!((s.qnr - (1.0 - s.d_s)).abs() < 1e-15);
    }

    #[test]
    fn bounded_and_checked() {
        let m = ms(6, 4, 8);
        let fused = ms(7, 4, 32);
        let pan = ms(8, 1, 32).band(0).clone();
        let cfg = QnrConfig { window: 8, ratio: 4, ..Default::default() };
        let s = qnr(&fused, &m, &pan, &cfg).unwrap();
        assert!((0.0..=1.0).contains(&s.qnr));
        assert!((0.0..=1.0).contains(&s.d_lambda) && (0.0..=1.0).contains(&s.d_s));
        let bad = QnrConfig { ratio: 2, ..cfg };
        assert!(matches!(qnr(&fused, &m, &pan, &bad), Err(Error::DimensionMismatch(_))));
        assert!(qnr(&fused, &m, &pan, &QnrConfig { alpha: 0.0, ..cfg }).is_err());
    }
}
