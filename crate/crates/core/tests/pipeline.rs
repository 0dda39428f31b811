use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonosim::beamsim::{
    default_grid, envelope_detect, image_phantom, lesion_free_region, point_snr, pulse_half_width,
    simulate_image, synthesize_rf, AcousticConfig,
};
use sonosim::phantom::{
    generate_phantom, generate_phantom_with_lesions, rasterize_lesions, rasterize_mask, Echogenicity,
    LesionShape, LesionSpec, Phantom, PhantomConfig,
};
use sonosim::{ImageGrid, Phantom64};

fn circle(class: Echogenicity, x: f64, z: f64, r: f64, scale: f64) -> LesionSpec {
    LesionSpec { class, shape: LesionShape::Circle, center: [x, 0.0, z], radii: [r; 3], scale }
}

/// Mean image value inside the lesion's cross-section and in a surrounding ring of equal area.
fn lesion_and_ring_means(img: &Array2<f64>, grid: &ImageGrid, lesion: &LesionSpec) -> (f64, f64) {
    let inner: f64 = 1.3;
    let outer = (1.0 + inner * inner).sqrt();
    let (mut a, mut na, mut b, mut nb) = (0.0, 0, 0.0, 0);
    for ((row, col), &v) in img.indexed_iter() {
        let dx = (grid.lateral_at(col) - lesion.center[0]) / lesion.radii[0];
        let dz = (grid.axial_at(row) - lesion.center[2]) / lesion.radii[2];
        let rho = (dx * dx + dz * dz).sqrt();
        if rho <= 1.0 {
            a += v;
            na += 1;
        } else if rho >= inner && rho <= outer {
            b += v;
            nb += 1;
        }
    }
    (a / na as f64, b / nb as f64)
}

#[test]
fn speckle_envelope_is_near_rayleigh() {
    let cfg = PhantomConfig::default();
    let acoustic = AcousticConfig::default();
    let phantom: Phantom64 = generate_phantom(&mut ChaCha8Rng::seed_from_u64(0), &cfg).unwrap();
    let acq = image_phantom(&phantom, &acoustic, &default_grid(&cfg)).unwrap();
    let roi = lesion_free_region(&acq.rf.geometry(), &cfg, &phantom.lesions, 3.0);
    let values: Vec<f64> = acq.envelope.iter().zip(roi.iter()).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
    assert!(values.len() >= 10_000);
    let snr = point_snr(values);
    assert!((1.7..=2.1).contains(&snr), "snr {snr}");
}

#[test]
fn single_scatterer_time_of_flight() {
    let cfg = PhantomConfig::default();
    let acoustic = AcousticConfig::default();
    let half = pulse_half_width(&acoustic);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let pitch = cfg.lateral_extent / (acoustic.n_lines - 1) as f64;
    for _ in 0..5 {
        let line = rng.gen_range(0..acoustic.n_lines);
        let x = -20.0 + line as f64 * pitch + rng.gen_range(-0.3..0.3);
        let (y, z) = (rng.gen_range(-2.0..2.0), rng.gen_range(31.0..89.0));
        let p = Phantom { config: cfg.clone(), lesions: vec![], positions: vec![[x, y, z]], amplitudes: vec![1.0] };
        let rf = synthesize_rf(&p, &acoustic);
        let env = envelope_detect(&rf.samples);
        let row = env.row(line);
        let peak = (0..row.len()).max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap()).unwrap();
        let dx = x - rf.geometry().line_x(line);
        let r = (dx * dx + y * y + z * z).sqrt() * 1e-3;
        let expected = (2.0 * r / acoustic.sound_speed * acoustic.sampling_frequency).round() as usize;
        assert!(peak.abs_diff(expected) <= half, "peak {peak}, expected {expected}");
    }
}

#[test]
fn rf_is_linear_in_amplitudes() {
    let cfg = PhantomConfig { scatterer_density: 0.5, ..Default::default() };
    let p: Phantom64 = generate_phantom(&mut ChaCha8Rng::seed_from_u64(5), &cfg).unwrap();
    let acoustic = AcousticConfig::default();
    let a = synthesize_rf(&p, &acoustic);
    for factor in [2.0, 0.5, -4.0] {
        let b = synthesize_rf(&p.scaled(factor), &acoustic);
        assert_eq!(a.samples.mapv(|v| factor * v), b.samples, "factor {factor}");
    }
}

#[test]
fn hypo_and_hyper_lesions_have_expected_contrast() {
    let cfg = PhantomConfig::default();
    let acoustic = AcousticConfig::default();
    let grid = default_grid(&cfg);
    for (class, scale) in [(Echogenicity::Hypoechoic, 0.1), (Echogenicity::Hyperechoic, 10.0)] {
        let lesion = circle(class, 2.0, 58.0, 6.0, scale);
        let p: Phantom64 =
            generate_phantom_with_lesions(&mut ChaCha8Rng::seed_from_u64(21), &cfg, vec![lesion]).unwrap();
        let img = image_phantom(&p, &acoustic, &grid).unwrap().image;
        let (inside, ring) = lesion_and_ring_means(&img.pixels, &grid, &lesion);
        match class {
            Echogenicity::Hypoechoic => assert!(inside < ring, "{inside} vs {ring}"),
            Echogenicity::Hyperechoic => assert!(inside > ring, "{inside} vs {ring}"),
        }
    }
}

#[test]
fn brighter_hypo_lesion_raises_in_lesion_mean() {
    let cfg = PhantomConfig::default();
    let acoustic = AcousticConfig::default();
    let grid = default_grid(&cfg);
    let mut previous = f64::NEG_INFINITY;
    for l in [0.05, 0.2, 0.4, 0.7, 0.95] {
        let lesion = circle(Echogenicity::Hypoechoic, -4.0, 62.0, 7.0, l);
        let p: Phantom64 =
            generate_phantom_with_lesions(&mut ChaCha8Rng::seed_from_u64(8), &cfg, vec![lesion]).unwrap();
        let img = image_phantom(&p, &acoustic, &grid).unwrap().image;
        let (inside, _) = lesion_and_ring_means(&img.pixels, &grid, &lesion);
        assert!(inside > previous, "l = {l}: {inside} <= {previous}");
        previous = inside;
    }
}

#[test]
fn simulate_image_is_deterministic_and_registered() {
    let cfg = PhantomConfig::default();
    let acoustic = AcousticConfig::default();
    let grid = default_grid(&cfg);
    let a = simulate_image::<f64>(1234, &cfg, &acoustic, &grid).unwrap();
    let b = simulate_image::<f64>(1234, &cfg, &acoustic, &grid).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.image.grid, a.mask.grid);
    assert_eq!(a.image.pixels.dim(), a.mask.pixels.dim());
    assert!(a.image.pixels.iter().all(|&v| (0.0..=1.0).contains(&v)));
    assert_eq!(a.mask, rasterize_mask(&a.lesions, &grid));
}

#[test]
fn f32_pipeline_runs() {
    let cfg = PhantomConfig { scatterer_density: 1.0, ..Default::default() };
    let sim = simulate_image::<f32>(3, &cfg, &AcousticConfig::default(), &default_grid(&cfg)).unwrap();
    assert!(sim.image.pixels.iter().all(|&v| (0.0..=1.0).contains(&v)));
}

/// Independent per-pixel point-in-ellipsoid test at y = 0.
fn brute_force_mask(lesions: &[LesionSpec], grid: &ImageGrid) -> Array2<u8> {
    let mut out = Array2::zeros((grid.height, grid.width));
    for row in 0..grid.height {
        for col in 0..grid.width {
            let p = [grid.origin_lateral + col as f64 * grid.lateral_spacing, 0.0, grid.origin_axial + row as f64 * grid.axial_spacing];
            for l in lesions.iter().filter(|l| l.class == Echogenicity::Hypoechoic) {
                let q: f64 = (0..3).map(|a| ((p[a] - l.center[a]) / l.radii[a]).powi(2)).sum();
                if q <= 1.0 {
                    out[[row, col]] = 1;
                }
            }
        }
    }
    out
}

#[test]
fn mask_matches_brute_force() {
    let cfg = PhantomConfig::default();
    let grid = ImageGrid::spanning(128, 85, (30.0, 90.0), (-20.0, 20.0)).unwrap();
    for seed in 0..10 {
        let lesions = sonosim::phantom::sample_lesions(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).unwrap();
        assert_eq!(rasterize_mask(&lesions, &grid).pixels, brute_force_mask(&lesions, &grid));
        let all = rasterize_lesions(&lesions, &grid);
        assert!(all.count() >= rasterize_mask(&lesions, &grid).count());
    }
}

#[test]
fn scaling_is_local_and_exact() {
    let cfg = PhantomConfig { scatterer_density: 1.0, ..Default::default() };
    let lesions = vec![
        circle(Echogenicity::Hyperechoic, 5.0, 50.0, 5.0, 7.0),
        circle(Echogenicity::Hypoechoic, -6.0, 70.0, 6.0, 0.3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let scaled: Phantom64 = generate_phantom_with_lesions(&mut rng, &cfg, lesions.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base: Phantom64 = generate_phantom_with_lesions(&mut rng, &cfg, vec![]).unwrap();
    assert_eq!(scaled.positions, base.positions);
    for ((p, &a), &b) in scaled.positions.iter().zip(&scaled.amplitudes).zip(&base.amplitudes) {
        let expected = lesions.iter().rev().find(|l| l.contains(*p)).map_or(1.0, |l| l.scale);
        assert_eq!(a, b * expected);
    }
}

#[test]
fn fixed_count_density() {
    let cfg = PhantomConfig::default();
    let mut total = 0usize;
    for seed in 0..100 {
        let lesions = vec![];
        let p: Phantom64 =
            generate_phantom_with_lesions(&mut ChaCha8Rng::seed_from_u64(seed), &cfg, lesions).unwrap();
        total += p.len();
    }
    assert_eq!(total as f64 / (100.0 * cfg.volume()), 4.0);
}
