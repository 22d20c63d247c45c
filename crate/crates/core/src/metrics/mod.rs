//! Fusion quality metrics.
//!
//! Reference-based: correlation coefficient, ERGAS, UIQI and Q4. No-reference:
//! QNR with its spectral (`D_λ`) and spatial (`D_s`) distortion indices.

mod moments;
mod q4;
mod qnr;
mod reference;
mod uiqi;

pub use moments::MomentSummary;
pub use q4::{q4, Quaternion, DEFAULT_Q4_BLOCK};
pub use qnr::{d_lambda, d_s, qnr, QnrConfig, QnrScore};
pub use reference::{band_error, correlation, ergas, BandError, RMSE_DECOMPOSITION_TOLERANCE};
pub use uiqi::{uiqi, UiqiMode};

use serde::Serialize;

use crate::error::Result;
use crate::raster::{BandImage, MultiBandImage};

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub method: String,
    /// Band-averaged correlation coefficient.
    pub cc: Option<f64>,
    pub cc_per_band: Vec<f64>,
    pub ergas: Option<f64>,
    /// Band-averaged whole-image UIQI.
    pub uiqi: Option<f64>,
    pub uiqi_per_band: Vec<f64>,
    /// `None` when the band count is not 4 or no reference exists.
    pub q4: Option<f64>,
    pub qnr: f64,
    pub d_lambda: f64,
    pub d_s: f64,
    pub selected_a: Option<f64>,
}

pub const CSV_HEADER: &str = "method,CC,ERGAS,UIQI,Q4,QNR,D_lambda,D_s,selected_a";

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

impl MetricReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method,
            cell(self.cc),
            cell(self.ergas),
            cell(self.uiqi),
            cell(self.q4),
            self.qnr,
            self.d_lambda,
            self.d_s,
            cell(self.selected_a)
        )
    }
}

pub fn reports_to_csv(reports: &[MetricReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Scores one fused product. Reference metrics are computed only when a
/// reference is given; ERGAS uses `h / l = 1 / config.ratio`.
pub fn full_report(
    method: &str,
    fused: &MultiBandImage,
    reference: Option<&MultiBandImage>,
    ms_original: &MultiBandImage,
    pan: &BandImage,
    config: &QnrConfig,
) -> Result<MetricReport> {
    let score = qnr(fused, ms_original, pan, config)?;
    let mut report = MetricReport {
        method: method.to_string(),
        cc: None,
        cc_per_band: Vec::new(),
        ergas: None,
        uiqi: None,
        uiqi_per_band: Vec::new(),
        q4: None,
        qnr: score.qnr,
        d_lambda: score.d_lambda,
        d_s: score.d_s,
        selected_a: None,
    };
    if let Some(reference) = reference {
        fused.check_same_shape(reference, "report")?;
        let n = fused.band_count() as f64;
        report.cc_per_band =
            fused.bands().iter().zip(reference.bands()).map(|(f, r)| correlation(f, r)).collect::<Result<_>>()?;
        report.cc = Some(report.cc_per_band.iter().sum::<f64>() / n);
        report.ergas = Some(ergas(fused, reference, 1.0, config.ratio as f64)?);
        report.uiqi_per_band = fused
            .bands()
            .iter()
            .zip(reference.bands())
            .map(|(f, r)| uiqi(f, r, UiqiMode::Global))
            .collect::<Result<_>>()?;
        report.uiqi = Some(report.uiqi_per_band.iter().sum::<f64>() / n);
        if fused.band_count() == 4 {
            let block = DEFAULT_Q4_BLOCK.min(fused.width()).min(fused.height());
            report.q4 = Some(q4(fused, reference, block)?);
        }
    }
    Ok(report)
}
