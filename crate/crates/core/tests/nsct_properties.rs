use std::f64::consts::PI;

use pansharp::nsct::{
    diamond_kernel, fan_kernel, filter2d, nsct_decompose, nsct_reconstruct, nsdfb_decompose, nsdfb_kernels,
    BoundaryMode, FilterKernel2D, NsctConfig, LINEARITY_TOLERANCE, RECONSTRUCTION_TOLERANCE,
};
use pansharp::BandImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_band(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BandImage {
    BandImage::from_fn(w, h, |_, _| rng.random_range(0.0..1000.0)).unwrap()
}

/// Magnitude of the DTFT, summed directly over the taps.
fn dtft_magnitude(k: &FilterKernel2D, wr: f64, wc: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (dy, dx, w) in k.offsets() {
        let phase = wr * dy as f64 + wc * dx as f64;
        re += w * phase.cos();
        im -= w * phase.sin();
    }
    re.hypot(im)
}

#[test]
fn reconstruction_over_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let modes = [BoundaryMode::Symmetric, BoundaryMode::Periodic, BoundaryMode::Zero];
    for case in 0..20 {
        let (w, h) = (rng.random_range(16..=64), rng.random_range(16..=64));
        let levels = rng.random_range(1..=3);
        let directions = (0..levels).map(|_| [1, 2, 4, 8][rng.random_range(0..4)]).collect();
        let cfg = NsctConfig::new(directions, modes[case % 3]).unwrap();
        let x = random_band(&mut rng, w, h);
        let err = nsct_reconstruct(&nsct_decompose(&x, &cfg).unwrap()).unwrap().max_abs_diff(&x).unwrap();
        assert!(err <= RECONSTRUCTION_TOLERANCE, "case {case} {cfg:?}: {err}");
    }
}

#[test]
fn periodic_shift_commutes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x = random_band(&mut rng, 40, 32);
    let cfg = NsctConfig::new(vec![4, 8], BoundaryMode::Periodic).unwrap();
    let base = nsct_decompose(&x, &cfg).unwrap();
    for _ in 0..3 {
        let (dx, dy) = (rng.random_range(-20i64..20) as isize, rng.random_range(-20i64..20) as isize);
        let moved = nsct_decompose(&x.shifted(dx, dy), &cfg).unwrap();
        for (a, b) in base.bands().zip(moved.bands()) {
            assert_eq!(a.shifted(dx, dy).data(), b.data());
        }
    }
}

#[test]
fn decomposition_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let x = random_band(&mut rng, 24, 24);
    let y = random_band(&mut rng, 24, 24);
    let (a, b) = (0.75, -1.5);
    let combo = x.zip_map(&y, |p, q| a * p + b * q).unwrap();
    let cfg = NsctConfig::default();
    let (dx, dy, dc) =
        (nsct_decompose(&x, &cfg).unwrap(), nsct_decompose(&y, &cfg).unwrap(), nsct_decompose(&combo, &cfg).unwrap());
    for ((p, q), c) in dx.bands().zip(dy.bands()).zip(dc.bands()) {
        let expect = p.zip_map(q, |u, v| a * u + b * v).unwrap();
        let scale = expect.min_max().1.abs().max(1.0);
        assert!(expect.max_abs_diff(c).unwrap() <= LINEARITY_TOLERANCE * scale);
    }
}

#[test]
fn constant_image_has_no_detail() {
    let x = BandImage::filled(33, 17, 42.0).unwrap();
    let d = nsct_decompose(&x, &NsctConfig::new(vec![2, 4, 8], BoundaryMode::Symmetric).unwrap()).unwrap();
    assert_eq!(d.lowpass, x);
    assert!(d.details.iter().flatten().all(|b| b.data().iter().all(|&v| v == 0.0)));
}

#[test]
fn diamond_and_fan_responses() {
    let d = diamond_kernel();
    assert!((dtft_magnitude(&d, 0.0, 0.0) - 1.0).abs() < 1e-12);
    assert!(dtft_magnitude(&d, PI, PI) < 1e-12);
    assert!(dtft_magnitude(&d, 0.3, 0.2) > 0.95);
    assert!(dtft_magnitude(&d, 2.8, 2.6) < 0.05);

    let fan = fan_kernel();
    let pass = dtft_magnitude(&fan, 0.0, PI / 2.0);
    let stop = dtft_magnitude(&fan, PI / 2.0, 0.0);
    assert!(pass >= 10.0 * stop, "pass {pass} stop {stop}");
}

#[test]
fn oriented_tones_land_in_distinct_channels() {
    let size = 64;
    // one exact periodic tone near the middle of each wedge
    let tones = [(3, 12), (9, 12), (12, 9), (12, 3), (12, -3), (12, -9), (9, -12), (3, -12)];
    let mut seen: Vec<usize> = tones
        .iter()
        .map(|&(kr, kc)| {
            let x = BandImage::from_fn(size, size, |c, r| {
                (2.0 * PI * (kr as f64 * r as f64 + kc as f64 * c as f64) / size as f64).cos()
            })
            .unwrap();
            let bands = nsdfb_decompose(&x, 8, BoundaryMode::Periodic).unwrap();
            let energy: Vec<f64> = bands.iter().map(|b| b.data().iter().map(|v| v * v).sum()).collect();
            let total: f64 = energy.iter().sum();
            let (best, e) = energy.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
            assert!(e / total > 0.6, "tone ({kr}, {kc}): {energy:?}");
            best
        })
        .collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 8);
}

#[test]
fn tree_shape_and_dc_gain() {
    let stages = nsdfb_kernels(3);
    assert_eq!(stages.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4]);
    let probe = BandImage::from_fn(31, 31, |c, r| if (c, r) == (15, 15) { 1.0 } else { 0.0 }).unwrap();
    let impulse = filter2d(&probe, &diamond_kernel(), BoundaryMode::Zero);
    assert!((impulse.data().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn two_channel_split_of_horizontal_sinusoid() {
    // varies along x only: vertical stripes
    let x = BandImage::from_fn(64, 64, |c, _| (PI / 2.0 * c as f64).cos()).unwrap();
    let bands = nsdfb_decompose(&x, 2, BoundaryMode::Periodic).unwrap();
    let energy: Vec<f64> = bands.iter().map(|b| b.data().iter().map(|v| v * v).sum()).collect();
    assert!(energy[0] >= 10.0 * energy[1], "{energy:?}");
    let predicted = dtft_magnitude(&fan_kernel(), 0.0, PI / 2.0).powi(2) * 64.0 * 64.0 / 2.0;
    assert!((energy[0] - predicted).abs() <= 1e-9 * predicted);
}
