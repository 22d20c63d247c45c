//! Evaluation harness: synthetic scenes, the reduced-resolution protocol,
//! QNR curves and histogram comparison.

mod histograms;
mod protocol;
mod scene;

pub use histograms::{histogram_report, HistogramPair};
pub use protocol::{
    base_config, curves_csv, evaluate, fuse_method, prepare_inputs, qnr_curve, run_protocol, save_fused, write_outcome,
    ExperimentSpec, FusedProduct, FusionSettings, InputSpec, PreparedInputs, ProtocolOutcome, DEFAULT_METHODS, ORACLE,
};
pub use scene::{make_scene, make_scene_with, SceneGenerator, SyntheticScene};
