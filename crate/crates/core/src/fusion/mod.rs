//! Pan-sharpening methods.

mod baselines;
mod brovey;
mod nnls;

pub use baselines::{ihs_fuse, pca_fuse, PcaTransform};
pub use brovey::{
    a_grid, adaptive_brovey, brovey, curve_argmax, decompose_bands, fit_weights, improved_adaptive_brovey,
    improved_with_ms_decomps, select_a, weighted_residual, BroveyVariant, ExponentSearch, ImprovedFusion, WeightFit,
};
pub use nnls::{nnls, nnls_gram, NnlsSolution};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nsct::NsctConfig;
use crate::raster::MultiBandImage;

/// Guard on Brovey denominators, in radiance units.
pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_A_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brovey,
    AdaptiveBrovey,
    ImprovedAdaptiveBrovey,
    Ihs,
    Pca,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::Brovey, Method::AdaptiveBrovey, Method::ImprovedAdaptiveBrovey, Method::Ihs, Method::Pca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brovey => "brovey",
            Method::AdaptiveBrovey => "adaptive-brovey",
            Method::ImprovedAdaptiveBrovey => "improved-adaptive-brovey",
            Method::Ihs => "ihs",
            Method::Pca => "pca",
        }
    }

    /// The Brovey variant whose exponent can be grid-searched, if any.
    pub fn variant(self) -> Option<BroveyVariant> {
        match self {
            Method::AdaptiveBrovey => Some(BroveyVariant::AdaptiveBrovey),
            Method::ImprovedAdaptiveBrovey => Some(BroveyVariant::ImprovedAdaptiveBrovey),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

/// Parameters of one Brovey-family fusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Injection exponent in `[0, 1]`.
    pub a: f64,
    /// Non-negative band weights of the synthetic PAN.
    pub weights: Vec<f64>,
    pub a_grid_step: f64,
    pub epsilon: f64,
    pub nsct: NsctConfig,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            weights: Vec::new(),
            a_grid_step: DEFAULT_A_STEP,
            epsilon: DEFAULT_EPSILON,
            nsct: NsctConfig::default(),
        }
    }
}

impl FusionConfig {
    pub fn validate(&self, bands: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::Config(format!("exponent a = {} outside [0, 1]", self.a)));
        }
        if self.weights.len() != bands {
            return Err(Error::Config(format!("{} weights for {bands} bands", self.weights.len())));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("weights must be non-negative with a positive sum".into()));
        }
        if !(self.a_grid_step > 0.0 && self.a_grid_step <= 1.0) {
            return Err(Error::Config(format!("grid step {} outside (0, 1]", self.a_grid_step)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionResult {
    #[serde(skip)]
    pub fused: MultiBandImage,
    pub method: Method,
    pub config_used: Option<FusionConfig>,
    pub selected_a: Option<f64>,
    pub qnr_curve: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

impl FusionResult {
    pub(crate) fn plain(fused: MultiBandImage, method: Method) -> Self {
        Self { fused, method, config_used: None, selected_a: None, qnr_curve: Vec::new(), notes: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("hpf".parse::<Method>().is_err());
        assert_eq!(serde_json::to_string(&Method::ImprovedAdaptiveBrovey).unwrap(), "\"improved-adaptive-brovey\"");
    }
}
