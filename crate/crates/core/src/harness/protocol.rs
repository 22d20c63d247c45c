//! Reduced-resolution evaluation runs: input preparation, per-method fusion,
//! scoring and artifact output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histograms::{histogram_report, HistogramPair};
use super::scene::{make_scene_with, SceneGenerator};
use crate::error::{Error, Result};
use crate::fusion::{
    adaptive_brovey, brovey, decompose_bands, fit_weights, ihs_fuse, improved_with_ms_decomps, pca_fuse, select_a,
    BroveyVariant, ExponentSearch, FusionConfig, FusionResult, Method,
};
use crate::metrics::{full_report, MetricReport, QnrConfig};
use crate::nsct::NsctConfig;
use crate::raster::{
    degrade, degrade_multiband, expand_multiband, load_scene, save_band, BandImage, Interpolation, MultiBandImage,
};

/// Label of the self-test method whose output is the reference itself.
pub const ORACLE: &str = "oracle";

pub const DEFAULT_METHODS: [&str; 5] = ["brovey", "adaptive-brovey", "improved-adaptive-brovey", "ihs", "pca"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputSpec {
    /// A PAN + MS scene on disk; evaluated by degrading both by `ratio`.
    Manifest { path: PathBuf },
    Synthetic {
        size: usize,
        bands: usize,
        #[serde(default)]
        generator: SceneGenerator,
    },
}

/// Fusion settings of a run. Absent `a` triggers the QNR grid search and
/// absent `weights` a least-squares fit against PAN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionSettings {
    pub a: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub a_grid_step: f64,
    pub epsilon: f64,
    pub nsct: NsctConfig,
    pub interpolation: Interpolation,
}

impl Default for FusionSettings {
    fn default() -> Self {
        let base = FusionConfig::default();
        Self {
            a: None,
            weights: None,
            a_grid_step: base.a_grid_step,
            epsilon: base.epsilon,
            nsct: base.nsct,
            interpolation: Interpolation::default(),
        }
    }
}

fn default_ratio() -> usize {
    4
}

fn default_methods() -> Vec<String> {
    DEFAULT_METHODS.iter().map(|m| m.to_string()).collect()
}

fn default_bins() -> usize {
    64
}

fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub input: InputSpec,
    #[serde(default = "default_ratio")]
    pub ratio: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default)]
    pub fusion: FusionSettings,
    /// `ratio` is always overwritten by the run ratio.
    #[serde(default)]
    pub qnr: QnrConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub run_id: Option<String>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

impl ExperimentSpec {
    pub fn synthetic(seed: u64, size: usize, bands: usize, ratio: usize) -> Self {
        Self {
            input: InputSpec::Synthetic { size, bands, generator: SceneGenerator::V1 },
            ratio,
            methods: default_methods(),
            fusion: FusionSettings::default(),
            qnr: QnrConfig { ratio, ..QnrConfig::default() },
            output_dir: default_output(),
            seed,
            run_id: None,
            histogram_bins: default_bins(),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratio < 2 {
            return Err(Error::Config(format!("protocol ratio must be >= 2, got {}", self.ratio)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        for m in &self.methods {
            if m != ORACLE {
                m.parse::<Method>()?;
            }
        }
        if let Some(a) = self.fusion.a {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config(format!("exponent a = {a} outside [0, 1]")));
            }
        }
        if self.histogram_bins == 0 {
            return Err(Error::Config("histogram bins must be >= 1".into()));
        }
        self.fusion.nsct.validate()?;
        self.qnr_config().validate()
    }

    pub fn qnr_config(&self) -> QnrConfig {
        QnrConfig { ratio: self.ratio, ..self.qnr }
    }

    /// Output subdirectory name; deterministic in the spec.
    pub fn resolved_run_id(&self) -> String {
        if let Some(id) = &self.run_id {
            return id.clone();
        }
        match &self.input {
            InputSpec::Synthetic { size, bands, .. } => {
                format!("synthetic-s{}-{}px-{}b-r{}", self.seed, size, bands, self.ratio)
            }
            InputSpec::Manifest { path } => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
                format!("{stem}-r{}", self.ratio)
            }
        }
    }
}

/// Inputs as seen by every fusion method of a run.
#[derive(Debug, Clone)]
pub struct PreparedInputs {
    /// PAN at the fusion scale.
    pub pan: BandImage,
    /// MS at its native (low) resolution for the fusion.
    pub ms_original: MultiBandImage,
    /// MS expanded onto the PAN grid.
    pub ms_expanded: MultiBandImage,
    pub reference: MultiBandImage,
}

pub fn prepare_inputs(spec: &ExperimentSpec) -> Result<PreparedInputs> {
    let r = spec.ratio;
    let (pan, ms_original, reference) = match &spec.input {
        InputSpec::Synthetic { size, bands, generator } => {
            let scene = make_scene_with(generator, spec.seed, *size, *bands, r)?;
            (scene.pan, scene.ms, scene.reference)
        }
        InputSpec::Manifest { path } => {
            let scene = load_scene(path)?;
            let pan =
                scene.pan.ok_or_else(|| Error::Config(format!("{}: protocol needs a PAN entry", path.display())))?;
            let (mw, mh) = scene.ms.dims();
            if pan.dims() != (mw * r, mh * r) {
                return Err(Error::DimensionMismatch(format!(
                    "PAN {}x{} is not MS {mw}x{mh} times ratio {r}",
                    pan.width(),
                    pan.height()
                )));
            }
            let ms_low = degrade_multiband(&scene.ms, r)?;
            (degrade(&pan, r)?, ms_low, scene.ms)
        }
    };
    let ms_expanded = expand_multiband(&ms_original, r, spec.fusion.interpolation)?;
    Ok(PreparedInputs { pan, ms_original, ms_expanded, reference })
}

/// Resolves weights and the non-searched settings into a fusion config; `a`
/// is the pinned value or 1 as a placeholder for the search.
pub fn base_config(spec: &ExperimentSpec, inputs: &PreparedInputs) -> Result<FusionConfig> {
    let weights = match &spec.fusion.weights {
        Some(w) => w.clone(),
        None => fit_weights(&inputs.pan, &inputs.ms_expanded)?.weights,
    };
    let cfg = FusionConfig {
        a: spec.fusion.a.unwrap_or(1.0),
        weights,
        a_grid_step: spec.fusion.a_grid_step,
        epsilon: spec.fusion.epsilon,
        nsct: spec.fusion.nsct.clone(),
    };
    cfg.validate(inputs.ms_expanded.band_count())?;
    Ok(cfg)
}

fn run_variant(
    variant: BroveyVariant,
    spec: &ExperimentSpec,
    inputs: &PreparedInputs,
    base: &FusionConfig,
) -> Result<FusionResult> {
    let qnr_cfg = spec.qnr_config();
    let (a, search) = match spec.fusion.a {
        Some(a) => (a, None),
        None => {
            let s = select_a(
                &inputs.pan,
                &inputs.ms_expanded,
                &inputs.ms_original,
                base.a_grid_step,
                variant,
                base,
                &qnr_cfg,
            )?;
            (s.best_a, Some(s))
        }
    };
    let cfg = FusionConfig { a, ..base.clone() };
    let mut result = match variant {
        BroveyVariant::AdaptiveBrovey => adaptive_brovey(&inputs.pan, &inputs.ms_expanded, &cfg)?,
        BroveyVariant::ImprovedAdaptiveBrovey => {
            let d = decompose_bands(&inputs.ms_expanded, &cfg.nsct)?;
            improved_with_ms_decomps(&inputs.pan, &inputs.ms_expanded, &d, &cfg)?.result
        }
    };
    result.selected_a = Some(a);
    if let Some(s) = search {
        result.qnr_curve = s.curve;
    }
    Ok(result)
}

/// Fuses with one method label of the spec.
pub fn fuse_method(
    label: &str,
    spec: &ExperimentSpec,
    inputs: &PreparedInputs,
    base: &FusionConfig,
) -> Result<FusedProduct> {
    if label == ORACLE {
        return Ok(FusedProduct {
            label: label.to_string(),
            fused: inputs.reference.clone(),
            config_used: None,
            selected_a: None,
            qnr_curve: Vec::new(),
            notes: vec!["reference returned unchanged".into()],
        });
    }
    let method: Method = label.parse()?;
    let result = match method {
        Method::Brovey => brovey(&inputs.pan, &inputs.ms_expanded, spec.fusion.epsilon)?,
        Method::Ihs => ihs_fuse(&inputs.pan, &inputs.ms_expanded)?,
        Method::Pca => pca_fuse(&inputs.pan, &inputs.ms_expanded)?,
        Method::AdaptiveBrovey | Method::ImprovedAdaptiveBrovey => {
            run_variant(method.variant().expect("brovey family"), spec, inputs, base)?
        }
    };
    Ok(FusedProduct {
        label: label.to_string(),
        fused: result.fused,
        config_used: result.config_used,
        selected_a: result.selected_a,
        qnr_curve: result.qnr_curve,
        notes: result.notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusedProduct {
    pub label: String,
    #[serde(skip)]
    pub fused: MultiBandImage,
    pub config_used: Option<FusionConfig>,
    pub selected_a: Option<f64>,
    pub qnr_curve: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

/// Everything a run produces, before anything is written.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolOutcome {
    pub run_id: String,
    pub spec: ExperimentSpec,
    pub reports: Vec<MetricReport>,
    pub products: Vec<FusedProduct>,
    pub histograms: Vec<(String, HistogramPair)>,
}

/// Runs every method of the spec in memory. Methods run concurrently; results
/// keep the order of `spec.methods`.
pub fn evaluate(spec: &ExperimentSpec) -> Result<ProtocolOutcome> {
    spec.validate()?;
    let inputs = prepare_inputs(spec)?;
    let needs_base = spec.methods.iter().any(|m| m.parse::<Method>().is_ok_and(|m| m.variant().is_some()));
    let base = if needs_base {
        base_config(spec, &inputs)?
    } else {
        FusionConfig { weights: vec![1.0; inputs.ms_expanded.band_count()], ..FusionConfig::default() }
    };
    let qnr_cfg = spec.qnr_config();
    let scored = spec
        .methods
        .par_iter()
        .map(|label| {
            let product = fuse_method(label, spec, &inputs, &base)?;
            let mut report = full_report(
                label,
                &product.fused,
                Some(&inputs.reference),
                &inputs.ms_original,
                &inputs.pan,
                &qnr_cfg,
            )?;
            report.selected_a = product.selected_a;
            let hist = (0..product.fused.band_count())
                .map(|b| histogram_report(&product.fused, &inputs.reference, b, spec.histogram_bins))
                .collect::<Result<Vec<_>>>()?;
            Ok((product, report, hist))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut products = Vec::new();
    let mut reports = Vec::new();
    let mut histograms = Vec::new();
    for (product, report, hist) in scored {
        histograms.extend(hist.into_iter().map(|h| (product.label.clone(), h)));
        products.push(product);
        reports.push(report);
    }
    let mut spec = spec.clone();
    spec.qnr = spec.qnr_config();
    Ok(ProtocolOutcome { run_id: spec.resolved_run_id(), spec, reports, products, histograms })
}

/// CSV of `(a, QNR)` rows, one block per searched method.
pub fn curves_csv(products: &[FusedProduct]) -> String {
    let mut out = String::from("method,a,QNR\n");
    for p in products {
        for (a, q) in &p.qnr_curve {
            let _ = writeln!(out, "{},{a},{q}", p.label);
        }
    }
    out
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes fused bands as 16-bit PGM under `dir/band_<i>.pgm`.
pub fn save_fused(fused: &MultiBandImage, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    for (i, band) in fused.bands().iter().enumerate() {
        save_band(band, &dir.join(format!("band_{i}.pgm")), 16)?;
    }
    Ok(())
}

/// Writes the artifacts of an outcome under `<output_dir>/<run_id>/` and
/// returns that directory.
pub fn write_outcome(outcome: &ProtocolOutcome) -> Result<PathBuf> {
    let run_dir = outcome.spec.output_dir.join(&outcome.run_id);
    create_dir(&run_dir)?;
    write_file(&run_dir.join("report.csv"), crate::metrics::reports_to_csv(&outcome.reports).as_bytes())?;
    write_file(&run_dir.join("report.json"), serde_json::to_string_pretty(outcome)?.as_bytes())?;
    write_file(&run_dir.join("qnr_curve.csv"), curves_csv(&outcome.products).as_bytes())?;

    let hist_dir = run_dir.join("histograms");
    create_dir(&hist_dir)?;
    let mut summary = String::from("method,band,l1_distance\n");
    for (label, pair) in &outcome.histograms {
        let _ = writeln!(summary, "{label},{},{}", pair.band_index, pair.l1_distance);
        write_file(&hist_dir.join(format!("{label}_band_{}.csv", pair.band_index)), pair.to_csv().as_bytes())?;
    }
    write_file(&hist_dir.join("summary.csv"), summary.as_bytes())?;

    for p in &outcome.products {
        save_fused(&p.fused, &run_dir.join("fused").join(&p.label))?;
    }
    Ok(run_dir)
}

/// Evaluates the spec and writes its artifacts.
pub fn run_protocol(spec: &ExperimentSpec) -> Result<(ProtocolOutcome, PathBuf)> {
    let outcome = evaluate(spec)?;
    let dir = write_outcome(&outcome)?;
    Ok((outcome, dir))
}

/// Grid-search curve for the first Brovey-family method of the spec.
pub fn qnr_curve(spec: &ExperimentSpec) -> Result<ExponentSearch> {
    spec.validate()?;
    let variant = spec
        .methods
        .iter()
        .filter_map(|m| m.parse::<Method>().ok().and_then(Method::variant))
        .next()
        .ok_or_else(|| Error::Config("qnr curve needs adaptive-brovey or improved-adaptive-brovey".into()))?;
    let inputs = prepare_inputs(spec)?;
    let base = base_config(spec, &inputs)?;
    select_a(
        &inputs.pan,
        &inputs.ms_expanded,
        &inputs.ms_original,
        spec.fusion.a_grid_step,
        variant,
        &base,
        &spec.qnr_config(),
    )
}
