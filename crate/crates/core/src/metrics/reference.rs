//! Reference-based metrics: correlation coefficient and ERGAS.

use super::moments::MomentSummary;
use crate::error::{Error, Result};
use crate::raster::{BandImage, MultiBandImage};

/// Relative tolerance of the `RMSE² = Bias² + SD²` cross-check run on every ERGAS call.
pub const RMSE_DECOMPOSITION_TOLERANCE: f64 = 1e-10;

/// Pearson correlation coefficient. Symmetric in its arguments.
pub fn correlation(a: &BandImage, b: &BandImage) -> Result<f64> {
    a.check_same_dims(b, "correlation")?;
    let m = MomentSummary::compute(a.data(), b.data())?;
    if m.constant_a || m.constant_b || m.std_a == 0.0 || m.std_b == 0.0 {
        return Err(Error::UndefinedMetric("correlation of a constant band".into()));
    }
    Ok((m.covariance / (m.variance_a * m.variance_b).sqrt()).clamp(-1.0, 1.0))
}

/// Squared error of one band split into its direct value, bias and deviation parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandError {
    pub rmse_sq: f64,
    pub bias: f64,
    pub sd: f64,
}

pub fn band_error(fused: &BandImage, reference: &BandImage) -> Result<BandError> {
    fused.check_same_dims(reference, "band error")?;
    let n = fused.len() as f64;
    let diff: Vec<f64> = fused.data().iter().zip(reference.data()).map(|(f, r)| f - r).collect();
    let rmse_sq = diff.iter().map(|d| d * d).sum::<f64>() / n;
    let bias = diff.iter().sum::<f64>() / n;
    let sd = (diff.iter().map(|d| (d - bias) * (d - bias)).sum::<f64>() / n).sqrt();
    let split = bias * bias + sd * sd;
    if (rmse_sq - split).abs() > RMSE_DECOMPOSITION_TOLERANCE * rmse_sq.max(1.0) {
        return Err(Error::Consistency(format!("RMSE² {rmse_sq} differs from Bias² + SD² {split}")));
    }
    Ok(BandError { rmse_sq, bias, sd })
}

/// `100 (h/l) sqrt(mean_i RMSE_i² / M_i²)` with `M_i` the reference band mean.
pub fn ergas(fused: &MultiBandImage, reference: &MultiBandImage, h: f64, l: f64) -> Result<f64> {
    fused.check_same_shape(reference, "ergas")?;
    if !(h > 0.0 && l > 0.0) {
        return Err(Error::InvalidParameter(format!("resolutions must be positive, got h={h}, l={l}")));
    }
    let mut acc = 0.0;
    for (i, (f, r)) in fused.bands().iter().zip(reference.bands()).enumerate() {
        let mean = r.mean();
        if mean == 0.0 {
            return Err(Error::UndefinedMetric(format!("reference band {i} has zero mean")));
        }
        acc += band_error(f, r)?.rmse_sq / (mean * mean);
    }
    Ok(100.0 * (h / l) * (acc / fused.band_count() as f64).sqrt())
}
