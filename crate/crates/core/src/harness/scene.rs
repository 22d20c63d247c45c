//! Seeded synthetic scenes with a known high-resolution reference.
//!
//! The reference is a piecewise material map (Voronoi cells with straight
//! edges plus disc-shaped blobs) shaded by a band-limited texture. Each
//! material has a fixed spectral signature; one of them behaves like
//! vegetation, dark in the visible and bright in the last band. PAN is a
//! non-negative weighted sum of the reference bands plus a small white
//! residual, and the MS image is the degraded reference.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{degrade_multiband, BandImage, MultiBandImage};

/// Signatures sampled at four anchor wavelengths (blue, green, red, NIR);
/// other band counts interpolate along the anchors.
const SIGNATURES: [[f64; 4]; 5] = [
    [0.30, 0.40, 0.52, 0.58], // soil
    [0.12, 0.24, 0.12, 0.85], // vegetation
    [0.22, 0.18, 0.10, 0.04], // water
    [0.50, 0.50, 0.52, 0.48], // built-up
    [0.40, 0.48, 0.60, 0.66], // sand
];

/// Spectral response of the PAN band at the same anchors.
const PAN_RESPONSE: [f64; 4] = [0.4, 1.0, 1.0, 1.2];

/// Generator parameters. [`SceneGenerator::V1`] is frozen; scenes produced by
/// a given version never change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneGenerator {
    pub version: u32,
    /// Number of Voronoi regions.
    pub regions: usize,
    pub blobs: usize,
    /// Sinusoid count of the texture field.
    pub waves: usize,
    /// Highest texture frequency, in cycles per image side.
    pub max_cycles: f64,
    /// Texture modulation depth in `[0, 1)`.
    pub texture_depth: f64,
    /// Per-band independent modulation depth.
    pub band_jitter: f64,
    /// Peak radiance scale.
    pub gain: f64,
    /// Standard deviation of the PAN residual, relative to `gain`.
    pub pan_noise: f64,
}

impl SceneGenerator {
    pub const V1: SceneGenerator = SceneGenerator {
        version: 1,
        regions: 14,
        blobs: 10,
        waves: 16,
        max_cycles: 24.0,
        texture_depth: 0.45,
        band_jitter: 0.06,
        gain: 1600.0,
        pan_noise: 0.004,
    };
}

impl Default for SceneGenerator {
    fn default() -> Self {
        Self::V1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub pan: BandImage,
    /// Low-resolution MS: `degrade(reference, ratio)`.
    pub ms: MultiBandImage,
    /// Ground-truth MS on the PAN grid.
    pub reference: MultiBandImage,
    pub ratio: usize,
    pub pan_weights: Vec<f64>,
}

fn anchor_interp(anchors: &[f64; 4], band: usize, bands: usize) -> f64 {
    if bands == 1 {
        return anchors.iter().sum::<f64>() / 4.0;
    }
    let t = band as f64 * 3.0 / (bands - 1) as f64;
    let i = (t.floor() as usize).min(2);
    let f = t - i as f64;
    anchors[i] * (1.0 - f) + anchors[i + 1] * f
}

struct Wave {
    fx: f64,
    fy: f64,
    phase: f64,
    amp: f64,
}

fn random_waves(rng: &mut ChaCha8Rng, count: usize, max_cycles: f64, size: usize) -> Vec<Wave> {
    let mut waves: Vec<Wave> = (0..count)
        .map(|_| {
            let cycles = rng.random_range(1.0..max_cycles);
            let angle = rng.random_range(0.0..TAU);
            Wave {
                fx: cycles * angle.cos() / size as f64,
                fy: cycles * angle.sin() / size as f64,
                phase: rng.random_range(0.0..TAU),
                amp: 1.0 / cycles.sqrt(),
            }
        })
        .collect();
    let total: f64 = waves.iter().map(|w| w.amp).sum();
    for w in &mut waves {
        w.amp /= total;
    }
    waves
}

fn eval_waves(waves: &[Wave], x: f64, y: f64) -> f64 {
    waves.iter().map(|w| w.amp * (TAU * (w.fx * x + w.fy * y) + w.phase).sin()).sum()
}

/// Builds a scene of `size × size` PAN pixels with `bands` MS bands.
pub fn make_scene(seed: u64, size: usize, bands: usize, ratio: usize) -> Result<SyntheticScene> {
    make_scene_with(&SceneGenerator::V1, seed, size, bands, ratio)
}

pub fn make_scene_with(
    generator: &SceneGenerator,
    seed: u64,
    size: usize,
    bands: usize,
    ratio: usize,
) -> Result<SyntheticScene> {
    if bands == 0 {
        return Err(Error::InvalidParameter("scene needs at least one band".into()));
    }
    if ratio == 0 || size == 0 || !size.is_multiple_of(ratio) {
        return Err(Error::InvalidParameter(format!("size {size} is not a positive multiple of ratio {ratio}")));
    }
    if generator.version != 1 {
        return Err(Error::InvalidParameter(format!("unknown generator version {}", generator.version)));
    }
    let g = generator;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = size as f64;

    let seeds: Vec<(f64, f64, usize)> = (0..g.regions.max(1))
        .map(|_| (rng.random_range(0.0..s), rng.random_range(0.0..s), rng.random_range(0..SIGNATURES.len())))
        .collect();
    let blobs: Vec<(f64, f64, f64, usize)> = (0..g.blobs)
        .map(|_| {
            (
                rng.random_range(0.0..s),
                rng.random_range(0.0..s),
                rng.random_range(0.02 * s..0.08 * s),
                rng.random_range(0..SIGNATURES.len()),
            )
        })
        .collect();
    let texture = random_waves(&mut rng, g.waves, g.max_cycles, size);
    let jitter: Vec<Vec<Wave>> = (0..bands).map(|_| random_waves(&mut rng, 4, g.max_cycles / 4.0, size)).collect();

    let material = |x: f64, y: f64| -> usize {
        if let Some(b) = blobs.iter().rev().find(|b| (x - b.0).powi(2) + (y - b.1).powi(2) < b.2 * b.2) {
            return b.3;
        }
        let nearest = seeds
            .iter()
            .min_by(|a, b| {
                let da = (x - a.0).powi(2) + (y - a.1).powi(2);
                let db = (x - b.0).powi(2) + (y - b.1).powi(2);
                da.total_cmp(&db)
            })
            .expect("at least one region");
        nearest.2
    };

    let signatures: Vec<Vec<f64>> =
        SIGNATURES.iter().map(|sig| (0..bands).map(|i| anchor_interp(sig, i, bands)).collect()).collect();
    let mut refs = vec![vec![0.0; size * size]; bands];
    for y in 0..size {
        for x in 0..size {
            let (fx, fy) = (x as f64, y as f64);
            let shade = 1.0 + g.texture_depth * eval_waves(&texture, fx, fy);
            let sig = &signatures[material(fx, fy)];
            for (i, band) in refs.iter_mut().enumerate() {
                let j = 1.0 + g.band_jitter * eval_waves(&jitter[i], fx, fy);
                band[y * size + x] = g.gain * shade * sig[i] * j;
            }
        }
    }

    let raw_weights: Vec<f64> = (0..bands).map(|i| anchor_interp(&PAN_RESPONSE, i, bands)).collect();
    let total: f64 = raw_weights.iter().sum();
    let pan_weights: Vec<f64> = raw_weights.iter().map(|w| w / total).collect();
    let noise = Normal::new(0.0, g.pan_noise * g.gain).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let pan_data: Vec<f64> = (0..size * size)
        .map(|k| {
            let v: f64 = refs.iter().zip(&pan_weights).map(|(b, w)| w * b[k]).sum();
            (v + noise.sample(&mut rng)).max(0.0)
        })
        .collect();

    let reference =
        MultiBandImage::new(refs.into_iter().map(|d| BandImage::new(size, size, d)).collect::<Result<Vec<_>>>()?)?;
    let ms = degrade_multiband(&reference, ratio)?;
    let pan = BandImage::new(size, size, pan_data)?;
    Ok(SyntheticScene { pan, ms, reference, ratio, pan_weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::correlation;

    #[test]
    fn deterministic_and_consistent() {
        let a = make_scene(7, 64, 4, 4).unwrap();
        let b = make_scene(7, 64, 4, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.pan, make_scene(8, 64, 4, 4).unwrap().pan);
        assert_eq!(a.ms, degrade_multiband(&a.reference, 4).unwrap());
        assert_eq!(a.ms.dims(), (16, 16));
        assert!(a.reference.bands().iter().all(|b| b.min_max().0 >= 0.0));
        assert!(a.pan.min_max().0 >= 0.0);
    }

    #[test]
    fn pan_tracks_reference_intensity() {
        for seed in 0..5 {
            let s = make_scene(seed, 128, 4, 4).unwrap();
            let c = correlation(&s.pan, &s.reference.band_mean()).unwrap();
            assert!(c >= 0.9, "seed {seed}: {c}");
        }
    }

    #[test]
    fn geometry_errors() {
        assert!(make_scene(1, 30, 4, 4).is_err());
        assert!(make_scene(1, 32, 0, 4).is_err());
        assert!(make_scene(1, 32, 3, 0).is_err());
        assert_eq!(make_scene(1, 32, 1, 2).unwrap().reference.band_count(), 1);
    }
}
