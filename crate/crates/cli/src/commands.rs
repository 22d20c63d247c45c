//! Command implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use pansharp::fusion::Method;
use pansharp::harness::{
    base_config, fuse_method, make_scene as synth_scene, qnr_curve as curve, run_protocol, save_fused, ExperimentSpec,
    InputSpec, PreparedInputs,
};
use pansharp::metrics::{correlation, ergas, q4, qnr, uiqi, QnrConfig, QnrScore, UiqiMode, DEFAULT_Q4_BLOCK};
use pansharp::nsct::{nsct_decompose, nsct_reconstruct, BoundaryMode, NsctConfig, RECONSTRUCTION_TOLERANCE};
use pansharp::raster::{
    expand_multiband, load_multiband, load_scene, read_pgm, save_band, write_manifest, BandEntry, Manifest, PanEntry,
};
use pansharp::{BandImage, Error, MultiBandImage, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{check_keys, parse_name, pick, require};
use crate::{CurveArgs, FuseArgs, FusionFlags, MetricsArgs, ProtocolArgs, SceneArgs, SelftestArgs, SpecFlags};

type File = Map<String, Value>;

fn echo(config: &impl Serialize) -> Result<()> {
    eprintln!("config: {}", serde_json::to_string(config)?);
    Ok(())
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))
}

const FUSION_KEYS: [&str; 8] = ["a", "weights", "a_step", "epsilon", "dirs", "boundary", "interpolation", "qnr_window"];

/// Applies fusion flags (falling back to `file`) onto a spec.
fn apply_fusion(spec: &mut ExperimentSpec, flags: FusionFlags, file: &File) -> Result<()> {
    let f = &mut spec.fusion;
    if let Some(a) = pick(flags.a, file, "a")? {
        f.a = Some(a);
    }
    if let Some(w) = pick(flags.weights, file, "weights")? {
        f.weights = Some(w);
    }
    if let Some(s) = pick(flags.a_step, file, "a_step")? {
        f.a_grid_step = s;
    }
    if let Some(e) = pick(flags.epsilon, file, "epsilon")? {
        f.epsilon = e;
    }
    if let Some(d) = pick(flags.dirs, file, "dirs")? {
        f.nsct = NsctConfig { levels: d.len(), directions: d, boundary: f.nsct.boundary };
    }
    if let Some(b) = pick(flags.boundary, file, "boundary")? {
        f.nsct.boundary = parse_name(&b, "boundary mode")?;
    }
    if let Some(i) = pick(flags.interpolation, file, "interpolation")? {
        f.interpolation = parse_name(&i, "interpolation")?;
    }
    if let Some(w) = pick(flags.qnr_window, file, "qnr_window")? {
        spec.qnr.window = w;
    }
    Ok(())
}

pub fn fuse(args: FuseArgs, file: File) -> Result<ExitCode> {
    let mut known = vec!["method", "manifest", "out"];
    known.extend(FUSION_KEYS);
    check_keys(&file, &known)?;
    let label: String = require(pick(args.method, &file, "method")?, "method")?;
    let method: Method = label.parse()?;
    let manifest: PathBuf = require(pick(args.manifest, &file, "manifest")?, "manifest")?;
    let out: PathBuf = require(pick(args.out, &file, "out")?, "out")?;

    let scene = load_scene(&manifest)?;
    let pan = scene.pan.ok_or_else(|| Error::Config(format!("{}: fusion needs a PAN entry", manifest.display())))?;
    let mut spec = ExperimentSpec {
        input: InputSpec::Manifest { path: manifest.clone() },
        methods: vec![label.clone()],
        output_dir: out.clone(),
        ..ExperimentSpec::synthetic(0, 0, 0, scene.ratio)
    };
    apply_fusion(&mut spec, args.fusion, &file)?;
    spec.validate()?;
    let (mw, mh) = scene.ms.dims();
    if pan.dims() != (mw * scene.ratio, mh * scene.ratio) {
        return Err(Error::DimensionMismatch(format!(
            "PAN {}x{} is not MS {mw}x{mh} times ratio {}",
            pan.width(),
            pan.height(),
            scene.ratio
        )));
    }
    let ms_expanded = expand_multiband(&scene.ms, scene.ratio, spec.fusion.interpolation)?;
    let inputs =
        PreparedInputs { pan, ms_original: scene.ms.clone(), ms_expanded: ms_expanded.clone(), reference: ms_expanded };
    let base = base_config(&spec, &inputs)?;
    let product = fuse_method(&label, &spec, &inputs, &base)?;
    let score = qnr(&product.fused, &inputs.ms_original, &inputs.pan, &spec.qnr_config())?;

    let resolved = json!({
        "command": "fuse",
        "method": method,
        "manifest": manifest,
        "out": out,
        "ratio": scene.ratio,
        "fusion": spec.fusion,
        "qnr": spec.qnr_config(),
        "fusion_config_used": product.config_used,
    });
    echo(&resolved)?;
    save_fused(&product.fused, &out)?;
    let names = scene.ms.names().map(<[String]>::to_vec);
    let bands = (0..product.fused.band_count())
        .map(|i| BandEntry {
            name: names.as_ref().map_or_else(|| format!("band_{i}"), |n| n[i].clone()),
            path: PathBuf::from(format!("band_{i}.pgm")),
        })
        .collect();
    write_manifest(&out.join("fused.json"), &Manifest { ratio: 1, bands, pan: None })?;
    let report = json!({
        "config": resolved,
        "selected_a": product.selected_a,
        "qnr_curve": product.qnr_curve,
        "notes": product.notes,
        "metrics": score,
    });
    write(&out.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
    println!("{} fused {} bands into {}", method, product.fused.band_count(), out.display());
    println!("QNR {} D_lambda {} D_s {}", score.qnr, score.d_lambda, score.d_s);
    if let Some(a) = product.selected_a {
        println!("a {a}");
    }
    Ok(ExitCode::SUCCESS)
}

/// A manifest file, or a directory holding `band_<i>.pgm` files.
fn load_bands(path: &Path) -> Result<MultiBandImage> {
    if !path.is_dir() {
        return load_multiband(path);
    }
    let entries = fs::read_dir(path).map_err(|e| Error::Config(format!("cannot list {}: {e}", path.display())))?;
    let mut found: Vec<(usize, PathBuf)> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?;
            let idx = name.strip_prefix("band_")?.strip_suffix(".pgm")?.parse().ok()?;
            Some((idx, p))
        })
        .collect();
    if found.is_empty() {
        return Err(Error::Config(format!("{}: no band_<i>.pgm files", path.display())));
    }
    found.sort();
    MultiBandImage::new(found.iter().map(|(_, p)| read_pgm(p)).collect::<Result<Vec<_>>>()?)
}

fn check_shape(a: &MultiBandImage, b: &MultiBandImage) -> Result<()> {
    if a.band_count() != b.band_count() || a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "fused is {} bands of {}x{}, reference is {} bands of {}x{}",
            a.band_count(),
            a.width(),
            a.height(),
            b.band_count(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct MetricsOutput {
    config: Value,
    cc: f64,
    cc_per_band: Vec<f64>,
    ergas: f64,
    uiqi: f64,
    uiqi_per_band: Vec<f64>,
    /// "not applicable" unless there are exactly 4 bands.
    q4: Value,
    qnr: Option<QnrScore>,
}

pub fn metrics(args: MetricsArgs, file: File) -> Result<ExitCode> {
    check_keys(&file, &["fused", "reference", "scene", "ratio", "qnr_window", "out"])?;
    let fused_path: PathBuf = require(pick(args.fused, &file, "fused")?, "fused")?;
    let ref_path: PathBuf = require(pick(args.reference, &file, "reference")?, "reference")?;
    let scene_path: Option<PathBuf> = pick(args.scene, &file, "scene")?;
    let ratio: usize = pick(args.ratio, &file, "ratio")?.unwrap_or(4);
    let out: Option<PathBuf> = pick(args.out, &file, "out")?;
    let mut qnr_cfg = QnrConfig { ratio, ..QnrConfig::default() };
    if let Some(w) = pick(args.qnr_window, &file, "qnr_window")? {
        qnr_cfg.window = w;
    }
    qnr_cfg.validate()?;
    let resolved = json!({
        "command": "metrics", "fused": fused_path, "reference": ref_path, "scene": scene_path,
        "ratio": ratio, "qnr": qnr_cfg, "out": out,
    });
    echo(&resolved)?;

    let fused = load_bands(&fused_path)?;
    let reference = load_bands(&ref_path)?;
    check_shape(&fused, &reference)?;
    let n = fused.band_count() as f64;
    let pairs = || fused.bands().iter().zip(reference.bands());
    let cc_per_band = pairs().map(|(f, r)| correlation(f, r)).collect::<Result<Vec<_>>>()?;
    let uiqi_per_band = pairs().map(|(f, r)| uiqi(f, r, UiqiMode::Global)).collect::<Result<Vec<_>>>()?;
    let q4_value = if fused.band_count() == 4 {
        json!(q4(&fused, &reference, DEFAULT_Q4_BLOCK.min(fused.width()).min(fused.height()))?)
    } else {
        json!("not applicable")
    };
    let qnr_score = match &scene_path {
        Some(p) => {
            let scene = load_scene(p)?;
            let pan = scene.pan.ok_or_else(|| Error::Config(format!("{}: QNR needs a PAN entry", p.display())))?;
            Some(qnr(&fused, &scene.ms, &pan, &qnr_cfg)?)
        }
        None => None,
    };
    let output = MetricsOutput {
        config: resolved,
        cc: cc_per_band.iter().sum::<f64>() / n,
        cc_per_band,
        ergas: ergas(&fused, &reference, 1.0, ratio as f64)?,
        uiqi: uiqi_per_band.iter().sum::<f64>() / n,
        uiqi_per_band,
        q4: q4_value,
        qnr: qnr_score,
    };
    let text = serde_json::to_string_pretty(&output)?;
    match out {
        Some(p) => write(&p, &text)?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// The config file as an experiment spec (a 256-pixel 4-band synthetic scene
/// when absent) with flag overrides applied.
fn resolve_spec(flags: SpecFlags, file: File) -> Result<ExperimentSpec> {
    let mut spec = if file.is_empty() {
        ExperimentSpec::synthetic(0, 256, 4, 4)
    } else {
        serde_json::from_value(Value::Object(file))?
    };
    if let Some(path) = flags.manifest {
        spec.input = InputSpec::Manifest { path };
    }
    if flags.size.is_some() || flags.bands.is_some() {
        match &mut spec.input {
            InputSpec::Synthetic { size, bands, .. } => {
                *size = flags.size.unwrap_or(*size);
                *bands = flags.bands.unwrap_or(*bands);
            }
            InputSpec::Manifest { .. } => {
                return Err(Error::Config("--size/--bands apply to synthetic input only".into()));
            }
        }
    }
    if let Some(seed) = flags.seed {
        spec.seed = seed;
    }
    if let Some(ratio) = flags.ratio {
        spec.ratio = ratio;
    }
    if let Some(methods) = flags.methods {
        spec.methods = methods;
    }
    if let Some(out) = flags.out {
        spec.output_dir = out;
    }
    if let Some(id) = flags.run_id {
        spec.run_id = Some(id);
    }
    apply_fusion(&mut spec, flags.fusion, &File::new())?;
    spec.qnr = spec.qnr_config();
    spec.validate()?;
    Ok(spec)
}

pub fn protocol(args: ProtocolArgs, file: File) -> Result<ExitCode> {
    let spec = resolve_spec(args.spec, file)?;
    echo(&spec)?;
    let (outcome, dir) = run_protocol(&spec)?;
    print!("{}", pansharp::metrics::reports_to_csv(&outcome.reports));
    println!("artifacts: {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

pub fn qnr_curve(args: CurveArgs, file: File) -> Result<ExitCode> {
    let mut spec = resolve_spec(args.spec, file)?;
    if let Some(m) = args.method {
        spec.methods = vec![m];
        spec.validate()?;
    }
    echo(&spec)?;
    let search = curve(&spec)?;
    let mut csv = String::from("a,QNR\n");
    for (a, q) in &search.curve {
        csv.push_str(&format!("{a},{q}\n"));
    }
    match args.csv {
        Some(p) => {
            write(&p, &csv)?;
            println!("points {} best_a {} best_qnr {}", search.curve.len(), search.best_a, search.best_qnr);
        }
        None => {
            print!("{csv}");
            eprintln!("best_a {} best_qnr {}", search.best_a, search.best_qnr);
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn make_scene(args: SceneArgs, file: File) -> Result<ExitCode> {
    check_keys(&file, &["seed", "size", "bands", "ratio", "out"])?;
    let seed: u64 = pick(args.seed, &file, "seed")?.unwrap_or(0);
    let size: usize = pick(args.size, &file, "size")?.unwrap_or(256);
    let bands: usize = pick(args.bands, &file, "bands")?.unwrap_or(4);
    let ratio: usize = pick(args.ratio, &file, "ratio")?.unwrap_or(4);
    let out: PathBuf = require(pick(args.out, &file, "out")?, "out")?;
    echo(&json!({"command": "make-scene", "seed": seed, "size": size, "bands": bands, "ratio": ratio, "out": out}))?;
    let scene = synth_scene(seed, size, bands, ratio)?;
    mkdir(&out)?;
    save_band(&scene.pan, &out.join("pan.pgm"), 16)?;
    let mut ms_entries = Vec::new();
    let mut ref_entries = Vec::new();
    for i in 0..bands {
        let (ms_name, ref_name) = (format!("ms_band_{i}.pgm"), format!("ref_band_{i}.pgm"));
        save_band(scene.ms.band(i), &out.join(&ms_name), 16)?;
        save_band(scene.reference.band(i), &out.join(&ref_name), 16)?;
        ms_entries.push(BandEntry { name: format!("band_{i}"), path: ms_name.into() });
        ref_entries.push(BandEntry { name: format!("band_{i}"), path: ref_name.into() });
    }
    let pan = Some(PanEntry { path: "pan.pgm".into() });
    write_manifest(&out.join("scene.json"), &Manifest { ratio, bands: ms_entries, pan })?;
    write_manifest(&out.join("reference.json"), &Manifest { ratio: 1, bands: ref_entries, pan: None })?;
    println!("scene written to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn nsct_selftest(args: SelftestArgs, file: File) -> Result<ExitCode> {
    check_keys(&file, &["levels", "dirs", "size", "seed", "boundary"])?;
    let levels: Option<usize> = pick(args.levels, &file, "levels")?;
    let dirs: Option<Vec<usize>> = pick(args.dirs, &file, "dirs")?;
    let size: usize = pick(args.size, &file, "size")?.unwrap_or(64);
    let seed: u64 = pick(args.seed, &file, "seed")?.unwrap_or(0);
    let boundary: BoundaryMode = match pick::<String>(args.boundary, &file, "boundary")? {
        Some(b) => parse_name(&b, "boundary mode")?,
        None => BoundaryMode::default(),
    };
    let directions = match (levels, dirs) {
        (_, Some(d)) => d,
        (Some(l), None) => vec![8; l],
        (None, None) => vec![8; 3],
    };
    let config = NsctConfig { levels: levels.unwrap_or(directions.len()), directions, boundary };
    config.validate()?;
    echo(&json!({"command": "nsct-selftest", "nsct": config, "size": size, "seed": seed}))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let image = BandImage::from_fn(size, size, |_, _| rng.random_range(0.0..255.0))?;
    let rebuilt = nsct_reconstruct(&nsct_decompose(&image, &config)?)?;
    let err = rebuilt.max_abs_diff(&image)?;
    println!("max reconstruction error: {err:e}");
    if err <= RECONSTRUCTION_TOLERANCE {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: consistency: reconstruction error {err:e} exceeds {RECONSTRUCTION_TOLERANCE:e}");
        Ok(ExitCode::FAILURE)
    }
}
