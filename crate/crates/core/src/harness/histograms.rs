//! Paired histograms of a fused band and its reference over a shared range.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{histogram_in_range, Histogram, MultiBandImage};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramPair {
    pub band_index: usize,
    pub fused: Histogram,
    pub reference: Histogram,
    /// Sum of absolute differences of the normalized frequencies, in `[0, 2]`.
    pub l1_distance: f64,
}

impl HistogramPair {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,fused,reference\n");
        for (i, (f, r)) in self.fused.counts.iter().zip(&self.reference.counts).enumerate() {
            let _ = writeln!(out, "{},{},{f},{r}", self.fused.edges[i], self.fused.edges[i + 1]);
        }
        out
    }
}

/// Bins both bands over `[min, max]` of their union.
pub fn histogram_report(
    fused: &MultiBandImage,
    reference: &MultiBandImage,
    band_index: usize,
    bins: usize,
) -> Result<HistogramPair> {
    if band_index >= fused.band_count() || band_index >= reference.band_count() {
        return Err(Error::InvalidParameter(format!(
            "band {band_index} out of range ({} fused, {} reference bands)",
            fused.band_count(),
            reference.band_count()
        )));
    }
    let (f, r) = (fused.band(band_index), reference.band(band_index));
    let (flo, fhi) = f.min_max();
    let (rlo, rhi) = r.min_max();
    let (lo, hi) = (flo.min(rlo), fhi.max(rhi));
    let hf = histogram_in_range(f, bins, lo, hi)?;
    let hr = histogram_in_range(r, bins, lo, hi)?;
    let l1_distance = hf.frequencies().iter().zip(hr.frequencies()).map(|(a, b)| (a - b).abs()).sum();
    Ok(HistogramPair { band_index, fused: hf, reference: hr, l1_distance })
}
