//! Ratio-based fusion: Brovey, Adaptive Brovey and Improved Adaptive Brovey,
//! plus the QNR-driven search for the injection exponent.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nnls::nnls_gram;
use super::{FusionConfig, FusionResult, Method};
use crate::error::{Error, Result};
use crate::metrics::{qnr, QnrConfig};
use crate::nsct::{nsct_decompose, nsct_reconstruct, replace_details, NsctConfig, NsctDecomposition};
use crate::raster::{BandImage, MultiBandImage};

pub(crate) fn check_inputs(pan: &BandImage, ms: &MultiBandImage) -> Result<()> {
    if ms.dims() != pan.dims() {
        return Err(Error::DimensionMismatch(format!(
            "expanded MS is {}x{}, PAN is {}x{}",
            ms.width(),
            ms.height(),
            pan.width(),
            pan.height()
        )));
    }
    Ok(())
}

/// Multiplies every band by a per-pixel gain.
fn apply_gain(ms: &MultiBandImage, gain: &[f64]) -> Result<MultiBandImage> {
    ms.map_bands(|b| {
        let data = b.data().iter().zip(gain).map(|(v, g)| g * v).collect();
        BandImage::new(b.width(), b.height(), data)
    })
}

/// `fused_i = pan / mean_j(ms_j) · ms_i`. Pixels whose band mean is below
/// `epsilon` keep their MS values.
pub fn brovey(pan: &BandImage, ms_expanded: &MultiBandImage, epsilon: f64) -> Result<FusionResult> {
    check_inputs(pan, ms_expanded)?;
    let mean = ms_expanded.band_mean();
    let gain: Vec<f64> =
        pan.data().iter().zip(mean.data()).map(|(&p, &m)| if m < epsilon { 1.0 } else { p.max(0.0) / m }).collect();
    Ok(FusionResult::plain(apply_gain(ms_expanded, &gain)?, Method::Brovey))
}

/// Fitted band weights for synthesising PAN from the MS bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFit {
    pub weights: Vec<f64>,
    /// `‖Σ b_i ms_i − pan‖₂`
    pub residual_norm: f64,
    pub kkt_residual: f64,
}

/// Non-negative least-squares fit of `pan ≈ Σ b_i ms_i`.
pub fn fit_weights(pan: &BandImage, ms_expanded: &MultiBandImage) -> Result<WeightFit> {
    check_inputs(pan, ms_expanded)?;
    let n = ms_expanded.band_count();
    if ms_expanded.bands().iter().all(|b| b.data().iter().all(|&v| v == 0.0)) {
        return Err(Error::InvalidParameter("cannot fit weights to all-zero MS bands".into()));
    }
    let bands: Vec<&[f64]> = ms_expanded.bands().iter().map(BandImage::data).collect();
    let gram = DMatrix::from_fn(n, n, |i, j| bands[i].iter().zip(bands[j]).map(|(a, b)| a * b).sum());
    let atb = DVector::from_fn(n, |i, _| bands[i].iter().zip(pan.data()).map(|(a, p)| a * p).sum());
    let btb = pan.data().iter().map(|p| p * p).sum();
    let sol = nnls_gram(&gram, &atb, btb)?;
    let residual_norm = weighted_residual(pan, ms_expanded, &sol.x);
    Ok(WeightFit { weights: sol.x, residual_norm, kkt_residual: sol.kkt_residual })
}

/// `‖Σ b_i ms_i − pan‖₂`, evaluated directly.
pub fn weighted_residual(pan: &BandImage, ms: &MultiBandImage, weights: &[f64]) -> f64 {
    let synth = weighted_sum(ms, weights);
    synth.iter().zip(pan.data()).map(|(s, p)| (s - p) * (s - p)).sum::<f64>().sqrt()
}

fn weighted_sum(ms: &MultiBandImage, weights: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; ms.band(0).len()];
    for (band, &w) in ms.bands().iter().zip(weights) {
        for (a, v) in acc.iter_mut().zip(band.data()) {
            *a += w * v;
        }
    }
    acc
}

/// `fused_i = (pan / Σ_j b_j ms_j)^a · ms_i`. Guarded pixels (denominator below
/// `epsilon`) keep their MS values.
pub fn adaptive_brovey(pan: &BandImage, ms_expanded: &MultiBandImage, config: &FusionConfig) -> Result<FusionResult> {
    check_inputs(pan, ms_expanded)?;
    config.validate(ms_expanded.band_count())?;
    let den = weighted_sum(ms_expanded, &config.weights);
    let gain: Vec<f64> = pan
        .data()
        .iter()
        .zip(&den)
        .map(|(&p, &d)| if d < config.epsilon { 1.0 } else { (p.max(0.0) / d).powf(config.a) })
        .collect();
    let fused = apply_gain(ms_expanded, &gain)?;
    Ok(FusionResult { config_used: Some(config.clone()), ..FusionResult::plain(fused, Method::AdaptiveBrovey) })
}

/// Per-band decompositions of the expanded MS image, reusable across exponents.
pub fn decompose_bands(ms: &MultiBandImage, nsct: &NsctConfig) -> Result<Vec<NsctDecomposition>> {
    ms.bands().par_iter().map(|b| nsct_decompose(b, nsct)).collect()
}

/// Improved Adaptive Brovey output together with the pre-clipping decomposition
/// of every fused band.
#[derive(Debug, Clone)]
pub struct ImprovedFusion {
    pub result: FusionResult,
    pub decompositions: Vec<NsctDecomposition>,
}

/// Keeps the NSCT lowpass of each MS band and takes every directional detail
/// band from the Adaptive Brovey product; negative samples are clipped to 0.
pub fn improved_adaptive_brovey(
    pan: &BandImage,
    ms_expanded: &MultiBandImage,
    config: &FusionConfig,
) -> Result<FusionResult> {
    let ms_decomps = decompose_bands(ms_expanded, &config.nsct)?;
    improved_with_ms_decomps(pan, ms_expanded, &ms_decomps, config).map(|f| f.result)
}

pub fn improved_with_ms_decomps(
    pan: &BandImage,
    ms_expanded: &MultiBandImage,
    ms_decomps: &[NsctDecomposition],
    config: &FusionConfig,
) -> Result<ImprovedFusion> {
    config.nsct.validate()?;
    if ms_decomps.len() != ms_expanded.band_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} MS decompositions for {} bands",
            ms_decomps.len(),
            ms_expanded.band_count()
        )));
    }
    let ab = adaptive_brovey(pan, ms_expanded, config)?;
    let per_band = ab
        .fused
        .bands()
        .par_iter()
        .zip(ms_decomps.par_iter())
        .map(|(ab_band, d_ms)| {
            let d_ab = nsct_decompose(ab_band, &config.nsct)?;
            let merged = replace_details(d_ms, &d_ab)?;
            let raw = nsct_reconstruct(&merged)?;
            Ok((raw.map(|v| v.max(0.0))?, merged))
        })
        .collect::<Result<Vec<_>>>()?;
    let (bands, decompositions): (Vec<_>, Vec<_>) = per_band.into_iter().unzip();
    let fused = MultiBandImage::new(bands)?;
    let result = FusionResult {
        config_used: Some(config.clone()),
        ..FusionResult::plain(fused, Method::ImprovedAdaptiveBrovey)
    };
    Ok(ImprovedFusion { result, decompositions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BroveyVariant {
    AdaptiveBrovey,
    ImprovedAdaptiveBrovey,
}

impl BroveyVariant {
    pub fn method(self) -> Method {
        match self {
            BroveyVariant::AdaptiveBrovey => Method::AdaptiveBrovey,
            BroveyVariant::ImprovedAdaptiveBrovey => Method::ImprovedAdaptiveBrovey,
        }
    }
}

/// `{0, step, 2·step, ...}` up to 1; `⌊1/step⌋ + 1` points. A last point within
/// rounding of 1 is snapped to exactly 1.
pub fn a_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("grid step must be in (0, 1], got {step}")));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| {
            let a = k as f64 * step;
            if (a - 1.0).abs() < 1e-9 {
                1.0
            } else {
                a.min(1.0)
            }
        })
        .collect())
}

/// Exponent choice from a QNR grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSearch {
    pub best_a: f64,
    pub best_qnr: f64,
    /// `(a, QNR)` for every grid point, ascending in `a`.
    pub curve: Vec<(f64, f64)>,
}

/// First index of the maximum; earlier (smaller `a`) wins ties.
pub fn curve_argmax(curve: &[(f64, f64)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &(_, q)) in curve.iter().enumerate() {
        if best.is_none_or(|b| q > curve[b].1) {
            best = Some(i);
        }
    }
    best
}

/// Fuses at every grid exponent and keeps the one with the highest QNR against
/// the original MS and PAN. `base` supplies weights, guard and NSCT settings;
/// its `a` is ignored.
pub fn select_a(
    pan: &BandImage,
    ms_expanded: &MultiBandImage,
    ms_original: &MultiBandImage,
    step: f64,
    variant: BroveyVariant,
    base: &FusionConfig,
    qnr_config: &QnrConfig,
) -> Result<ExponentSearch> {
    let grid = a_grid(step)?;
    let ms_decomps = match variant {
        BroveyVariant::ImprovedAdaptiveBrovey => Some(decompose_bands(ms_expanded, &base.nsct)?),
        BroveyVariant::AdaptiveBrovey => None,
    };
    let curve = grid
        .par_iter()
        .map(|&a| {
            let cfg = FusionConfig { a, ..base.clone() };
            let fused = match &ms_decomps {
                Some(d) => improved_with_ms_decomps(pan, ms_expanded, d, &cfg)?.result.fused,
                None => adaptive_brovey(pan, ms_expanded, &cfg)?.fused,
            };
            Ok((a, qnr(&fused, ms_original, pan, qnr_config)?.qnr))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = curve_argmax(&curve).expect("grid is never empty");
    Ok(ExponentSearch { best_a: curve[best].0, best_qnr: curve[best].1, curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px(values: &[f64]) -> BandImage {
        BandImage::new(values.len(), 1, values.to_vec()).unwrap()
    }

    fn ms_of(pixels: &[&[f64]]) -> MultiBandImage {
        let n = pixels[0].len();
        MultiBandImage::new((0..n).map(|b| px(&pixels.iter().map(|p| p[b]).collect::<Vec<_>>())).collect()).unwrap()
    }

    fn config(a: f64, weights: Vec<f64>) -> FusionConfig {
        FusionConfig { a, weights, ..FusionConfig::default() }
    }

    #[test]
    fn brovey_arithmetic() {
        let ms = ms_of(&[&[2.0, 4.0, 6.0], &[0.0, 0.0, 0.0]]);
        let pan = px(&[8.0, 50.0]);
        let f = brovey(&pan, &ms, 1e-9).unwrap().fused;
        assert_eq!([f.band(0).get(0, 0), f.band(1).get(0, 0), f.band(2).get(0, 0)], [4.0, 8.0, 12.0]);
        assert!(f.bands().iter().all(|b| b.get(1, 0) == 0.0));
    }

    #[test]
    fn brovey_unit_gain() {
        let ms = ms_of(&[&[1.0, 3.0], &[10.0, 20.0]]);
        let pan = ms.band_mean();
        assert_eq!(brovey(&pan, &ms, 1e-9).unwrap().fused, ms);
    }

    #[test]
    fn adaptive_arithmetic() {
        let ms = ms_of(&[&[2.0, 4.0]]);
        let pan = px(&[9.0]);
        let f = adaptive_brovey(&pan, &ms, &config(0.5, vec![0.5, 0.5])).unwrap().fused;
        let g = 3f64.sqrt();
        assert!((f.band(0).get(0, 0) - 2.0 * g).abs() < 1e-12);
        assert!((f.band(1).get(0, 0) - 4.0 * g).abs() < 1e-12);
        assert!((2.0 * g - 3.4641).abs() < 1e-4 && (4.0 * g - 6.9282).abs() < 1e-4);
    }

    #[test]
    fn adaptive_endpoints() {
        let ms = ms_of(&[&[2.0, 4.0, 1.0], &[7.0, 3.0, 5.0], &[0.0, 0.0, 0.0]]);
        let pan = px(&[9.0, 2.0, 4.0]);
        let zero = adaptive_brovey(&pan, &ms, &config(0.0, vec![0.3, 0.2, 0.9])).unwrap().fused;
        assert_eq!(zero, ms);
        let one = adaptive_brovey(&pan, &ms, &config(1.0, vec![1.0 / 3.0; 3])).unwrap().fused;
        let b = brovey(&pan, &ms, 1e-9).unwrap().fused;
        for (x, y) in one.bands().iter().zip(b.bands()) {
            assert!(x.max_abs_diff(y).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let ms = ms_of(&[&[2.0, 4.0]]);
        let pan = px(&[9.0]);
        assert!(adaptive_brovey(&pan, &ms, &config(1.5, vec![0.5, 0.5])).is_err());
        assert!(adaptive_brovey(&pan, &ms, &config(0.5, vec![0.5])).is_err());
        assert!(adaptive_brovey(&pan, &ms, &config(0.5, vec![0.0, 0.0])).is_err());
        assert!(adaptive_brovey(&px(&[1.0, 2.0]), &ms, &config(0.5, vec![0.5, 0.5])).is_err());
    }

    #[test]
    fn fit_weight_examples() {
        let b1 = [1.0, 2.0, 5.0, 3.0];
        let b2 = [4.0, 1.0, 0.0, 2.0];
        let ms1 = MultiBandImage::new(vec![px(&b1)]).unwrap();
        let fit = fit_weights(&px(&b1.map(|v| 2.0 * v)), &ms1).unwrap();
        assert!((fit.weights[0] - 2.0).abs() < 1e-12 && fit.residual_norm < 1e-9);

        let ms2 = MultiBandImage::new(vec![px(&b1), px(&b2)]).unwrap();
        let pan: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| a + b).collect();
        let fit = fit_weights(&px(&pan), &ms2).unwrap();
        assert!((fit.weights[0] - 1.0).abs() < 1e-12 && (fit.weights[1] - 1.0).abs() < 1e-12);

        let fit = fit_weights(&px(&b1.map(|v| -v)), &ms1).unwrap();
        assert_eq!(fit.weights, vec![0.0]);

        let zero = MultiBandImage::new(vec![px(&[0.0; 4])]).unwrap();
        assert!(fit_weights(&px(&b1), &zero).is_err());
    }

    #[test]
    fn grid_construction() {
        let g = a_grid(0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[20]), (0.0, 1.0));
        assert_eq!(a_grid(0.02).unwrap().len(), 51);
        assert_eq!(a_grid(1.0).unwrap(), vec![0.0, 1.0]);
        assert!(a_grid(0.0).is_err() && a_grid(1.5).is_err());
        assert_eq!(curve_argmax(&[(0.0, 0.5), (0.5, 0.9), (1.0, 0.9)]), Some(1));
    }
}
