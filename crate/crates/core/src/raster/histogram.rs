use serde::Serialize;

use super::BandImage;
use crate::error::{Error, Result};

/// Bins are left-closed and right-open except the last, which is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts normalised to unit mass.
    pub fn frequencies(&self) -> Vec<f64> {
        let t = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

pub fn histogram(band: &BandImage, bins: usize) -> Result<Histogram> {
    let (lo, hi) = band.min_max();
    histogram_in_range(band, bins, lo, hi)
}

/// Histogram over an explicit `[lo, hi]`. Samples outside the range land in the
/// nearest end bin. When `lo == hi` a single unit-wide bin centred on the value is used.
pub fn histogram_in_range(band: &BandImage, bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bins < 1 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!("bad histogram range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Histogram { edges: vec![lo - 0.5, lo + 0.5], counts: vec![band.len() as u64] });
    }
    let span = hi - lo;
    let edges = (0..=bins).map(|k| lo + span * k as f64 / bins as f64).collect::<Vec<_>>();
    let mut counts = vec![0u64; bins];
    for &v in band.data() {
        let pos = ((v - lo) / span * bins as f64).floor();
        let idx = (pos.max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}
