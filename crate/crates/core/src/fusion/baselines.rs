//! Component-substitution baselines: IHS and PCA.

use nalgebra::{DMatrix, SymmetricEigen};

use super::brovey::check_inputs;
use super::{FusionResult, Method};
use crate::error::{Error, Result};
use crate::raster::{BandImage, MultiBandImage};

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// Rescales `src` to the given mean and standard deviation. A constant source
/// maps to the target mean.
fn match_moments(src: &[f64], mean: f64, std: f64) -> Vec<f64> {
    let (m, s) = mean_std(src);
    if s == 0.0 {
        return vec![mean; src.len()];
    }
    src.iter().map(|v| (v - m) * (std / s) + mean).collect()
}

fn clipped(width: usize, height: usize, data: Vec<f64>) -> Result<BandImage> {
    BandImage::new(width, height, data.into_iter().map(|v| v.max(0.0)).collect())
}

/// Fast IHS: intensity is the mean of the first three bands; `pan` matched to
/// the intensity's mean and deviation replaces it additively in every band.
pub fn ihs_fuse(pan: &BandImage, ms_expanded: &MultiBandImage) -> Result<FusionResult> {
    check_inputs(pan, ms_expanded)?;
    let n = ms_expanded.band_count();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("IHS needs at least 3 bands, got {n}")));
    }
    let intensity: Vec<f64> =
        (0..pan.len()).map(|i| (0..3).map(|b| ms_expanded.band(b).data()[i]).sum::<f64>() / 3.0).collect();
    let (im, is) = mean_std(&intensity);
    let matched = match_moments(pan.data(), im, is);
    let detail: Vec<f64> = matched.iter().zip(&intensity).map(|(p, i)| p - i).collect();
    let fused = ms_expanded
        .map_bands(|b| clipped(b.width(), b.height(), b.data().iter().zip(&detail).map(|(v, d)| v + d).collect()))?;
    let mut result = FusionResult::plain(fused, Method::Ihs);
    if n > 3 {
        result.notes.push(format!("intensity computed from bands 1-3 of {n}; detail added to all bands"));
    }
    Ok(result)
}

/// Principal-component basis of a band stack.
#[derive(Debug, Clone)]
pub struct PcaTransform {
    pub means: Vec<f64>,
    /// Column `k` holds the loadings of component `k`, components by decreasing variance.
    pub loadings: DMatrix<f64>,
    pub variances: Vec<f64>,
}

impl PcaTransform {
    pub fn fit(ms: &MultiBandImage) -> Result<Self> {
        let n = ms.band_count();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("PCA needs at least 2 bands, got {n}")));
        }
        if let Some(i) = ms.bands().iter().position(|b| b.data().iter().all(|&v| v == b.data()[0])) {
            return Err(Error::InvalidParameter(format!("band {i} has zero variance")));
        }
        let means: Vec<f64> = ms.bands().iter().map(BandImage::mean).collect();
        let p = ms.band(0).len() as f64;
        let cov = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (ms.band(i).data(), ms.band(j).data());
            a.iter().zip(b).map(|(x, y)| (x - means[i]) * (y - means[j])).sum::<f64>() / p
        });
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut loadings = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        // orientation: every component's loadings sum to a non-negative value
        for c in 0..n {
            if loadings.column(c).sum() < 0.0 {
                loadings.column_mut(c).neg_mut();
            }
        }
        let variances = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        Ok(Self { means, loadings, variances })
    }

    /// Component images, one `Vec` per component.
    pub fn forward(&self, ms: &MultiBandImage) -> Vec<Vec<f64>> {
        let n = self.means.len();
        let len = ms.band(0).len();
        (0..n)
            .map(|k| {
                let mut pc = vec![0.0; len];
                for i in 0..n {
                    let w = self.loadings[(i, k)];
                    for (o, v) in pc.iter_mut().zip(ms.band(i).data()) {
                        *o += w * (v - self.means[i]);
                    }
                }
                pc
            })
            .collect()
    }

    /// Back-projection to band space (no clipping).
    pub fn inverse(&self, components: &[Vec<f64>], width: usize, height: usize) -> Result<MultiBandImage> {
        let n = self.means.len();
        let bands = (0..n)
            .map(|i| {
                let mut band = vec![self.means[i]; width * height];
                for (k, pc) in components.iter().enumerate() {
                    let w = self.loadings[(i, k)];
                    for (o, v) in band.iter_mut().zip(pc) {
                        *o += w * v;
                    }
                }
                BandImage::new(width, height, band)
            })
            .collect::<Result<Vec<_>>>()?;
        MultiBandImage::new(bands)
    }
}

/// PCA substitution: the first component is replaced by `pan` matched to its
/// mean and deviation, then the stack is back-projected and clipped at 0.
pub fn pca_fuse(pan: &BandImage, ms_expanded: &MultiBandImage) -> Result<FusionResult> {
    check_inputs(pan, ms_expanded)?;
    let pca = PcaTransform::fit(ms_expanded)?;
    let mut pcs = pca.forward(ms_expanded);
    let (m, s) = mean_std(&pcs[0]);
    pcs[0] = match_moments(pan.data(), m, s);
    let back = pca.inverse(&pcs, pan.width(), pan.height())?;
    let fused = back.map_bands(|b| clipped(b.width(), b.height(), b.data().to_vec()))?;
    Ok(FusionResult::plain(fused, Method::Pca))
}
