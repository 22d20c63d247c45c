//! Q4: the quality index extended to 4-band pixels treated as quaternions
//! `z = b1 + i b2 + j b3 + k b4`.

use rayon::prelude::*;

use super::moments::luminance;
use super::uiqi::{check_window, window_origins};
use crate::error::{Error, Result};
use crate::raster::MultiBandImage;

pub const DEFAULT_Q4_BLOCK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub fn hamilton(self, o: Quaternion) -> Quaternion {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quaternion([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn conj(self) -> Quaternion {
        let [a, b, c, d] = self.0;
        Quaternion([a, -b, -c, -d])
    }

    pub fn norm_sq(self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }

    fn add_assign(&mut self, o: Quaternion) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }

    fn scale(self, s: f64) -> Quaternion {
        Quaternion(self.0.map(|v| v * s))
    }
}

/// Q4 of one block of pixel quaternions. Degenerate blocks follow the UIQI conventions.
pub(crate) fn q4_block(a: &[Quaternion], b: &[Quaternion]) -> f64 {
    let n = a.len() as f64;
    let mean = |v: &[Quaternion]| {
        let mut m = Quaternion::default();
        v.iter().for_each(|q| m.add_assign(*q));
        m.scale(1.0 / n)
    };
    let (ma, mb) = (mean(a), mean(b));
    let lum = luminance(ma.norm(), mb.norm());
    let const_a = a.iter().all(|q| *q == a[0]);
    let const_b = b.iter().all(|q| *q == b[0]);
    match (const_a, const_b) {
        (true, true) => return lum,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut cov = Quaternion::default();
    let (mut va, mut vb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x.sub(ma), y.sub(mb));
        cov.add_assign(dx.hamilton(dy.conj()));
        va += dx.norm_sq();
        vb += dy.norm_sq();
    }
    let (cov, va, vb) = (cov.scale(1.0 / n), va / n, vb / n);
    2.0 * cov.norm() / (va + vb) * lum
}

fn pixels(img: &MultiBandImage, x0: usize, y0: usize, block: usize) -> Vec<Quaternion> {
    let w = img.width();
    let mut out = Vec::with_capacity(block * block);
    for y in y0..y0 + block {
        for x in x0..x0 + block {
            let i = y * w + x;
            out.push(Quaternion(std::array::from_fn(|b| img.band(b).data()[i])));
        }
    }
    out
}

/// Mean Q4 over non-overlapping `block × block` tiles.
pub fn q4(fused: &MultiBandImage, reference: &MultiBandImage, block: usize) -> Result<f64> {
    fused.check_same_shape(reference, "q4")?;
    if fused.band_count() != 4 {
        return Err(Error::InvalidParameter(format!("q4 needs 4 bands, got {}", fused.band_count())));
    }
    check_window(block, fused.width(), fused.height())?;
    let origins = window_origins(fused.width(), fused.height(), block, block);
    let scores: Vec<f64> = origins
        .par_iter()
        .map(|&(x, y)| q4_block(&pixels(fused, x, y, block), &pixels(reference, x, y, block)))
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
