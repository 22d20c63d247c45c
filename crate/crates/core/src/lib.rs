//! Pan-sharpening with the Brovey transform family.
//!
//! * [`raster`]: band images, PGM/manifest I/O, resampling, histograms.
//! * [`nsct`]: nonsubsampled contourlet transform.
//! * [`fusion`]: Brovey, Adaptive Brovey, Improved Adaptive Brovey, IHS and PCA.
//! * [`metrics`]: CC, ERGAS, UIQI, Q4 and QNR.
//! * [`harness`]: synthetic scenes and the reduced-resolution evaluation protocol.

pub mod error;
pub mod fusion;
pub mod harness;
pub mod metrics;
pub mod nsct;
pub mod raster;

pub use error::{Error, Result};
pub use raster::{BandImage, MultiBandImage};
