use std::fs;
use std::path::Path;

use pansharp::harness::{evaluate, make_scene, qnr_curve, run_protocol, ExperimentSpec, InputSpec, ORACLE};
use pansharp::metrics::{correlation, ergas, reports_to_csv, CSV_HEADER};
use pansharp::raster::{expand_multiband, save_band, write_manifest, BandEntry, Interpolation, Manifest, PanEntry};

fn small_spec(seed: u64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::synthetic(seed, 64, 4, 4);
    spec.fusion.a_grid_step = 0.25;
    spec
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn five_method_report_and_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = small_spec(1);
    spec.output_dir = tmp.path().to_path_buf();
    let (outcome, dir) = run_protocol(&spec).unwrap();
    assert_eq!(outcome.reports.len(), 5);
    let csv = fs::read_to_string(dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(csv.lines().count(), 6);
    for file in ["report.json", "qnr_curve.csv", "histograms/summary.csv", "fused/pca/band_3.pgm"] {
        assert!(dir.join(file).is_file(), "{file}");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["spec"]["ratio"], 4);
    assert_eq!(json["reports"].as_array().unwrap().len(), 5);

    let first = read_tree(&dir);
    run_protocol(&spec).unwrap();
    assert_eq!(first, read_tree(&dir));
}

#[test]
fn oracle_scores_perfectly() {
    let mut spec = small_spec(2);
    spec.methods = vec![ORACLE.into()];
    let r = &evaluate(&spec).unwrap().reports[0];
    assert_eq!((r.cc, r.ergas, r.uiqi, r.q4), (Some(1.0), Some(0.0), Some(1.0), Some(1.0)));
}

#[test]
fn zero_exponent_row_matches_expanded_ms() {
    let mut spec = small_spec(3);
    spec.methods = vec!["adaptive-brovey".into()];
    spec.fusion.a = Some(0.0);
    let r = &evaluate(&spec).unwrap().reports[0];
    let scene = make_scene(3, 64, 4, 4).unwrap();
    let up = expand_multiband(&scene.ms, 4, Interpolation::Bilinear).unwrap();
    assert_eq!(r.ergas, Some(ergas(&up, &scene.reference, 1.0, 4.0).unwrap()));
    let cc: Vec<f64> =
        up.bands().iter().zip(scene.reference.bands()).map(|(u, f)| correlation(u, f).unwrap()).collect();
    assert_eq!(r.cc_per_band, cc);
    assert_eq!(r.selected_a, Some(0.0));
}

#[test]
fn curve_grid_and_argmax() {
    let mut spec = small_spec(4);
    spec.methods = vec!["improved-adaptive-brovey".into()];
    spec.fusion.a_grid_step = 0.05;
    let s = qnr_curve(&spec).unwrap();
    assert_eq!(s.curve.len(), 21);
    assert_eq!((s.curve[0].0, s.curve[20].0), (0.0, 1.0));
    let max = s.curve.iter().map(|c| c.1).fold(f64::MIN, f64::max);
    let first = s.curve.iter().find(|c| c.1 == max).unwrap();
    assert_eq!((first.0, first.1), (s.best_a, s.best_qnr));
    assert_eq!(qnr_curve(&spec).unwrap(), s);
    spec.methods = vec!["brovey".into()];
    assert!(qnr_curve(&spec).is_err());
}

#[test]
fn improved_histogram_closer_than_brovey() {
    for seed in 0..3 {
        let mut spec = ExperimentSpec::synthetic(seed, 128, 4, 4);
        spec.methods = vec!["brovey".into(), "improved-adaptive-brovey".into()];
        spec.fusion.a_grid_step = 0.1;
        let o = evaluate(&spec).unwrap();
        let green = |m: &str| o.histograms.iter().find(|(l, h)| l == m && h.band_index == 1).unwrap().1.l1_distance;
        assert!(green("improved-adaptive-brovey") <= green("brovey"), "seed {seed}");
    }
}

#[test]
fn real_data_mode_degrades_both_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = make_scene(5, 64, 3, 4).unwrap();
    save_band(&scene.pan, &tmp.path().join("pan.pgm"), 16).unwrap();
    let mut bands = Vec::new();
    for (i, b) in scene.ms.bands().iter().enumerate() {
        let name = format!("b{i}.pgm");
        save_band(b, &tmp.path().join(&name), 16).unwrap();
        bands.push(BandEntry { name: format!("band {i}"), path: name.into() });
    }
    let manifest = tmp.path().join("scene.json");
    write_manifest(&manifest, &Manifest { ratio: 4, bands, pan: Some(PanEntry { path: "pan.pgm".into() }) }).unwrap();

    let mut spec = ExperimentSpec::synthetic(0, 0, 0, 4);
    spec.input = InputSpec::Manifest { path: manifest };
    spec.methods = vec!["brovey".into(), "ihs".into(), ORACLE.into()];
    let o = evaluate(&spec).unwrap();
    assert_eq!(o.products[0].fused.dims(), (16, 16));
    assert_eq!(o.reports[1].q4, None);
    assert_eq!(o.reports[2].ergas, Some(0.0));
    assert!(reports_to_csv(&o.reports).contains("ihs,"));

    spec.ratio = 3;
    assert!(evaluate(&spec).is_err());
}

#[test]
fn invalid_specs_rejected() {
    let mut spec = small_spec(0);
    spec.methods.clear();
    assert!(evaluate(&spec).is_err());
    let mut spec = small_spec(0);
    spec.ratio = 1;
    assert!(evaluate(&spec).is_err());
    let mut spec = small_spec(0);
    spec.methods = vec!["wavelet".into()];
    assert!(evaluate(&spec).is_err());
}
