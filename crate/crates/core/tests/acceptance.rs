//! End-to-end acceptance gate. Each test covers one numbered criterion
//! and prints a single PASS line; tolerances are asserted, not logged.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tactip_core::classify::{
    spearman, t_sweep, train_sgd, Architecture, Classifier, TrainConfig,
};
use tactip_core::contact::ForceGrid;
use tactip_core::imagery::{
    adaptive_threshold, extract_centroids, find_blobs, remove_large_blobs, GrayFrame, MarkerSet,
};
use tactip_core::pressure::{
    magnitude_sum, predict_pressure, train_pressure_model, PressureSample,
};
use tactip_core::simulator::{
    press_hold_script, press_shear_script, run_script, surface_split, synthesize_press_dataset,
    temporal_split, texture_split, Action, ScriptStep, SensorConfig, StimulusScript, SurfaceKind,
    SurfaceSpec,
};
use tactip_core::tracking::{
    average_vector, match_points, predict_markers, train_marker_model, AugmentSpec, MARKER_COUNT,
};

fn pass(n: u32, name: &str) {
    println!("ACCEPTANCE {:02} {} - PASS", n, name);
}

/// A long mixed stimulus with at least `frames` frames.
fn mixed_script(frames: u32) -> StimulusScript {
    StimulusScript::new(
        SurfaceSpec::preset(SurfaceKind::Hard),
        vec![
            ScriptStep {
                frames: 5,
                action: Action::Idle,
            },
            ScriptStep {
                frames: 25,
                action: Action::Press { depth: 0.6 },
            },
            ScriptStep {
                frames: 25,
                action: Action::Shear {
                    dir: (0.6, 0.8),
                    speed: 1.0,
                },
            },
            ScriptStep {
                frames: 20,
                action: Action::Release,
            },
            ScriptStep {
                frames: frames.saturating_sub(75).max(1),
                action: Action::Press { depth: 0.9 },
            },
        ],
    )
}

fn preprocess(frame: &GrayFrame) -> tactip_core::imagery::BinaryFrame {
    let binary = adaptive_threshold(frame, 15, 10.0).unwrap();
    remove_large_blobs(&binary, 100).unwrap()
}

#[test]
fn criterion_01_closed_loop_marker_recovery() {
    let start = Instant::now();
    let config = SensorConfig::default(); // noise-free, no glare
    let (truths, frames) = run_script(&mixed_script(100), &config, 41, true).unwrap();
    assert!(frames.len() >= 100);
    for (truth, frame) in truths.iter().zip(frames.iter()).take(100) {
        let cleaned = preprocess(frame);
        let markers = extract_centroids(&cleaned, 5).unwrap();
        assert_eq!(markers.points.len(), MARKER_COUNT, "frame {}", truth.frame_index);
        let assignment = match_points(&truth.marker_set(), &markers, 0.5).unwrap();
        assert_eq!(
            assignment.pairs.len(),
            MARKER_COUNT,
            "frame {}: some centroid further than 0.5 px from truth",
            truth.frame_index
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "runtime budget exceeded");
    pass(1, "closed-loop marker recovery");
}

#[test]
fn criterion_02_glare_handling() {
    let config = SensorConfig::default().with_glare();
    let (truths, frames) = run_script(&mixed_script(60), &config, 42, true).unwrap();

    let mut saw_glare_blob = false;
    for frame in &frames {
        let binary = adaptive_threshold(frame, 15, 10.0).unwrap();
        if find_blobs(&binary).iter().any(|b| b.area > 100) {
            saw_glare_blob = true;
        }
        let cleaned = remove_large_blobs(&binary, 100).unwrap();
        assert!(
            find_blobs(&cleaned).iter().all(|b| b.area <= 100),
            "oversized component survived removal"
        );
    }
    assert!(saw_glare_blob, "glare never produced an oversized component");

    // The fixed-count localizer still reports all markers on glare frames.
    let samples: Vec<_> = truths
        .iter()
        .zip(frames.iter())
        .step_by(7)
        .map(|(t, f)| (preprocess(f), t.positions.clone()))
        .collect();
    let model = train_marker_model(&samples, 150.0, &AugmentSpec::default(), 64).unwrap();
    for frame in &frames {
        let markers = predict_markers(&model, &preprocess(frame));
        assert_eq!(markers.points.len(), MARKER_COUNT);
    }
    pass(2, "glare handling");
}

#[test]
fn criterion_03_contact_grid_oracle() {
    // Hand-computed example: 4x4 frame, 2x2 grid, one quadrant jumps by
    // 40. Cell mean |diff| = 40, global mean = 10, so the active cell
    // accumulates 30 and the others clamp at 0.
    let flat = GrayFrame::new(4, 4, vec![100; 16], 0).unwrap();
    let mut bumped = vec![100u8; 16];
    for y in 0..2 {
        for x in 0..2 {
            bumped[y * 4 + x] = 140;
        }
    }
    let next = GrayFrame::new(4, 4, bumped, 1).unwrap();
    let mut grid = ForceGrid::new(flat, 2, 0.0).unwrap();
    grid.update(next).unwrap();
    let activation = grid.activation();
    assert!((activation[0] - 30.0).abs() < 1e-12);
    for &a in &activation[1..] {
        assert!(a.abs() < 1e-12);
    }

    // Random pairs: activations never go negative, and a positive
    // dampener drains them back to zero once frames stop changing.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..10_000 {
        let a: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
        let b: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
        let gamma = rng.gen_range(0.5..4.0);
        let mut grid =
            ForceGrid::new(GrayFrame::new(4, 4, a, 0).unwrap(), 2, gamma).unwrap();
        grid.update(GrayFrame::new(4, 4, b.clone(), 1).unwrap()).unwrap();
        assert!(
            grid.activation().iter().all(|&v| v >= 0.0),
            "case {}: negative activation",
            case
        );
        for i in 0..200 {
            if grid.total_activation() == 0.0 {
                break;
            }
            grid.update(GrayFrame::new(4, 4, b.clone(), 2 + i).unwrap())
                .unwrap();
        }
        assert_eq!(grid.total_activation(), 0.0, "case {}: no decay to zero", case);
    }
    pass(3, "contact grid oracle");
}

/// Independent oracle: enumerate all pairs within range, repeatedly take
/// the globally shortest among unused points.
fn greedy_oracle(origins: &[(f64, f64)], currents: &[(f64, f64)], max_dist: f64) -> f64 {
    let mut pairs = Vec::new();
    for (i, &o) in origins.iter().enumerate() {
        for (j, &c) in currents.iter().enumerate() {
            let d = ((o.0 - c.0).powi(2) + (o.1 - c.1).powi(2)).sqrt();
            if d <= max_dist {
                pairs.push((d, i, j));
            }
        }
    }
    let mut used_o = vec![false; origins.len()];
    let mut used_c = vec![false; currents.len()];
    let mut total = 0.0;
    loop {
        let best = pairs
            .iter()
            .filter(|&&(_, i, j)| !used_o[i] && !used_c[j])
            .min_by(|a, b| a.partial_cmp(b).unwrap());
        match best {
            Some(&(d, i, j)) => {
                used_o[i] = true;
                used_c[j] = true;
                total += d;
            }
            None => return total,
        }
    }
}

#[test]
fn criterion_04_matching_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..1000 {
        let n_o = rng.gen_range(0..=8);
        let n_c = rng.gen_range(0..=8);
        let pt = |rng: &mut ChaCha8Rng| (rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        let origins: Vec<_> = (0..n_o).map(|_| pt(&mut rng)).collect();
        let currents: Vec<_> = (0..n_c).map(|_| pt(&mut rng)).collect();
        let max_dist = rng.gen_range(1.0..15.0);
        let assignment = match_points(
            &MarkerSet { points: origins.clone() },
            &MarkerSet { points: currents.clone() },
            max_dist,
        )
        .unwrap();
        let total: f64 = assignment
            .pairs
            .iter()
            .map(|&(i, j)| {
                let (o, c) = (origins[i], currents[j]);
                ((o.0 - c.0).powi(2) + (o.1 - c.1).powi(2)).sqrt()
            })
            .sum();
        let expected = greedy_oracle(&origins, &currents, max_dist);
        assert!(
            (total - expected).abs() < 1e-9,
            "case {}: total {} vs oracle {}",
            case,
            total,
            expected
        );
        // Partial injection: no point used twice.
        let mut seen_o = std::collections::HashSet::new();
        let mut seen_c = std::collections::HashSet::new();
        for &(i, j) in &assignment.pairs {
            assert!(seen_o.insert(i) && seen_c.insert(j), "case {}: reuse", case);
        }
    }
    pass(4, "matching oracle");
}

fn final_average_vector(
    config: &SensorConfig,
    rest: &[(f64, f64)],
    script: &StimulusScript,
    seed: u64,
) -> (f64, f64) {
    let (truths, _) = run_script(script, config, seed, false).unwrap();
    let last = truths.last().unwrap();
    average_vector(&last.vector_field(rest)).unwrap()
}

#[test]
fn criterion_05_direction_separability() {
    let config = SensorConfig {
        jitter_noise_std: 0.15,
        actuation_noise_std: 0.02,
        ..SensorConfig::default()
    };
    let rest = config.rest_layout().unwrap();
    let hard = SurfaceSpec::preset(SurfaceKind::Hard);
    let mut left_x: Vec<f64> = Vec::new();
    let mut right_x: Vec<f64> = Vec::new();
    let mut shear_mag = Vec::new();
    let mut press_mag = Vec::new();
    for trial in 0..30u64 {
        let left = press_shear_script(hard.clone(), 0.5, (-1.0, 0.0), 1.0, 8);
        let right = press_shear_script(hard.clone(), 0.5, (1.0, 0.0), 1.0, 8);
        let press = press_hold_script(hard.clone(), 0.5, 10);
        let (lx, ly) = final_average_vector(&config, &rest, &left, 100 + trial);
        let (rx, ry) = final_average_vector(&config, &rest, &right, 200 + trial);
        let (px, py) = final_average_vector(&config, &rest, &press, 300 + trial);
        left_x.push(lx);
        right_x.push(rx);
        shear_mag.push((lx * lx + ly * ly).sqrt());
        shear_mag.push((rx * rx + ry * ry).sqrt());
        press_mag.push((px * px + py * py).sqrt());
    }
    assert!(left_x.iter().all(|&x| x < 0.0), "left shear x sign leak");
    assert!(right_x.iter().all(|&x| x > 0.0), "right shear x sign leak");
    let shear_mean = shear_mag.iter().sum::<f64>() / shear_mag.len() as f64;
    let press_mean = press_mag.iter().sum::<f64>() / press_mag.len() as f64;
    assert!(
        press_mean < 0.25 * shear_mean,
        "press magnitude {} not small vs shear {}",
        press_mean,
        shear_mean
    );
    pass(5, "direction separability");
}

#[test]
fn criterion_06_slip_attenuation() {
    let config = SensorConfig {
        jitter_noise_std: 0.15,
        actuation_noise_std: 0.02,
        ..SensorConfig::default()
    };
    let rest = config.rest_layout().unwrap();
    let mut hard_mag = Vec::new();
    let mut slip_mag = Vec::new();
    for trial in 0..30u64 {
        for (kind, out) in [
            (SurfaceKind::Hard, &mut hard_mag),
            (SurfaceKind::Slippery, &mut slip_mag),
        ] {
            let script =
                press_shear_script(SurfaceSpec::preset(kind), 0.5, (1.0, 0.0), 1.0, 8);
            let (x, y) = final_average_vector(&config, &rest, &script, 400 + trial);
            out.push((x * x + y * y).sqrt());
        }
    }
    let hard_mean = hard_mag.iter().sum::<f64>() / 30.0;
    let slip_mean = slip_mag.iter().sum::<f64>() / 30.0;
    assert!(
        slip_mean < 0.3 * hard_mean,
        "slip mean {} vs hard mean {}",
        slip_mean,
        hard_mean
    );
    pass(6, "slip attenuation");
}

/// Pool-adjacent-violators isotonic fit of y on x, evaluated by linear
/// interpolation: the best monotone calibration of a scalar feature.
struct Isotonic {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Isotonic {
    fn fit(mut pairs: Vec<(f64, f64)>) -> Isotonic {
        pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut blocks: Vec<(f64, f64)> = Vec::new(); // (sum, weight)
        for &(_, y) in &pairs {
            blocks.push((y, 1.0));
            while blocks.len() > 1 {
                let n = blocks.len();
                if blocks[n - 2].0 / blocks[n - 2].1 > blocks[n - 1].0 / blocks[n - 1].1 {
                    let (s2, w2) = blocks.pop().unwrap();
                    let (s1, w1) = blocks.pop().unwrap();
                    blocks.push((s1 + s2, w1 + w2));
                } else {
                    break;
                }
            }
        }
        let mut ys = Vec::with_capacity(pairs.len());
        for &(s, w) in &blocks {
            for _ in 0..w as usize {
                ys.push(s / w);
            }
        }
        Isotonic {
            xs: pairs.into_iter().map(|p| p.0).collect(),
            ys,
        }
    }

    fn predict(&self, x: f64) -> f64 {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => self.ys[i],
            Err(0) => self.ys[0],
            Err(i) if i >= self.ys.len() => *self.ys.last().unwrap(),
            Err(i) => {
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let (y0, y1) = (self.ys[i - 1], self.ys[i]);
                if x1 > x0 {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                } else {
                    y0
                }
            }
        }
    }
}

fn mae(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for (a, b) in pairs {
        total += (a - b).abs();
        n += 1;
    }
    total / n as f64
}

#[test]
fn criterion_07_pressure_regression() {
    let config = SensorConfig {
        jitter_noise_std: 0.15,
        ..SensorConfig::default()
    };
    let samples = synthesize_press_dataset(&config, 500, 11).unwrap();
    let (test, train): (&[PressureSample], &[PressureSample]) = samples.split_at(125);
    let model = train_pressure_model(train, 150.0).unwrap();
    let ridge_mae = mae(test
        .iter()
        .map(|s| (predict_pressure(&model, &s.vectors).unwrap(), s.pressure)));
    assert!(ridge_mae < 1.25, "ridge MAE {} too high", ridge_mae);

    let iso = Isotonic::fit(
        train
            .iter()
            .map(|s| (magnitude_sum(&s.vectors), s.pressure))
            .collect(),
    );
    let iso_mae = mae(test
        .iter()
        .map(|s| (iso.predict(magnitude_sum(&s.vectors)), s.pressure)));
    assert!(
        ridge_mae < iso_mae,
        "ridge MAE {} not below calibrated magnitude-sum MAE {}",
        ridge_mae,
        iso_mae
    );
    pass(7, "pressure regression beats calibrated magnitude sum");
}

#[test]
fn criterion_08_soft_hard_divergence() {
    let train_config = SensorConfig {
        jitter_noise_std: 0.15,
        ..SensorConfig::default()
    };
    let samples = synthesize_press_dataset(&train_config, 400, 11).unwrap();
    let model = train_pressure_model(&samples, 150.0).unwrap();

    let config = SensorConfig {
        jitter_noise_std: 0.15,
        actuation_noise_std: 0.04,
        ..SensorConfig::default()
    };
    let rest = config.rest_layout().unwrap();
    let range_for = |kind: SurfaceKind, depth: f64| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for trial in 0..100u64 {
            let script = press_hold_script(SurfaceSpec::preset(kind), depth, 10);
            let (truths, _) =
                run_script(&script, &config, 1000 + trial * 7 + depth.to_bits() % 97, false)
                    .unwrap();
            let p =
                predict_pressure(&model, &truths.last().unwrap().vector_field(&rest)).unwrap();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    };
    let overlap = |a: (f64, f64), b: (f64, f64)| a.1 >= b.0 && b.1 >= a.0;

    let soft_low = range_for(SurfaceKind::Soft, 0.1);
    let hard_low = range_for(SurfaceKind::Hard, 0.1);
    assert!(
        overlap(soft_low, hard_low),
        "expected overlap at depth 0.1: soft {:?} hard {:?}",
        soft_low,
        hard_low
    );

    let soft_high = range_for(SurfaceKind::Soft, 1.0);
    let hard_high = range_for(SurfaceKind::Hard, 1.0);
    assert!(
        !overlap(soft_high, hard_high),
        "expected separation at depth 1.0: soft {:?} hard {:?}",
        soft_high,
        hard_high
    );
    pass(8, "soft/hard divergence");
}

#[test]
fn criterion_09_texture_classification() {
    for (name, kinds) in [
        ("lego-vs-smooth", [SurfaceKind::Lego, SurfaceKind::SmoothWood]),
        (
            "concrete-vs-smooth",
            [SurfaceKind::Concrete, SurfaceKind::SmoothWood],
        ),
    ] {
        let start = Instant::now();
        let data = texture_split(&kinds, 40, 10, 10, 4, 7).unwrap();
        let arch = Architecture::Cnn {
            in_rows: 320,
            in_cols: 32,
            filters: 8,
            stride: 4,
            hidden: 1000,
            classes: 2,
            dropout: 0.2,
        };
        let mut model = Classifier::new(arch, 1).unwrap();
        let config = TrainConfig {
            epochs: 30,
            learning_rate: 0.05,
            batch: 32,
            seed: 1,
        };
        train_sgd(&mut model, &data.train_x, &data.train_y, &config).unwrap();
        let accuracy = model.evaluate(&data.test_x, &data.test_y).unwrap();
        assert!(accuracy >= 0.99, "{}: held-out accuracy {}", name, accuracy);
        assert!(
            start.elapsed().as_secs_f64() < 600.0,
            "{}: runtime budget exceeded",
            name
        );
    }

    // Four-class surface task must be fully fit at T=10.
    let data = surface_split(40, 10, 10, 3).unwrap();
    let arch = Architecture::Fnn {
        input: data.train_x.ncols(),
        hidden: (256, 64),
        classes: 4,
        dropout: 0.2,
    };
    let mut model = Classifier::new(arch, 1).unwrap();
    let config = TrainConfig {
        epochs: 30,
        learning_rate: 0.05,
        batch: 32,
        seed: 1,
    };
    let curve = train_sgd(&mut model, &data.train_x, &data.train_y, &config).unwrap();
    assert_eq!(*curve.accuracy.last().unwrap(), 1.0, "4-class train accuracy");
    pass(9, "texture classification");
}

#[test]
fn criterion_10_t_monotonicity() {
    let config = TrainConfig {
        epochs: 400,
        learning_rate: 0.5,
        batch: 16,
        seed: 0,
    };
    let points = t_sweep(
        |t, seed| temporal_split(30, 15, t, 0.9, 0.65, seed),
        &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        20,
        (32, 16),
        &config,
        2,
        42,
    )
    .unwrap();
    let ts: Vec<f64> = points.iter().map(|p| p.t as f64).collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let rho = spearman(&ts, &means);
    assert!(rho > 0.0, "Spearman {} not positive (means {:?})", rho, means);
    assert!(
        means[9] >= means[0] + 0.05,
        "mean(T=10)={} not 5 points above mean(T=1)={}",
        means[9],
        means[0]
    );
    pass(10, "temporal context monotonicity");
}

#[test]
fn criterion_11_gradient_checks() {
    for (arch, seed) in [
        (
            Architecture::Fnn {
                input: 9,
                hidden: (7, 5),
                classes: 3,
                dropout: 0.0,
            },
            3u64,
        ),
        (
            Architecture::Cnn {
                in_rows: 14,
                in_cols: 12,
                filters: 3,
                stride: 2,
                hidden: 10,
                classes: 2,
                dropout: 0.0,
            },
            5,
        ),
    ] {
        let mut model = Classifier::new(arch.clone(), seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let n = 4;
        let x = DMatrix::from_fn(n, arch.input_len(), |_, _| rng.gen_range(-1.0..1.0));
        let labels: Vec<usize> = (0..n).map(|i| i % arch.classes()).collect();
        let (_, analytic) = model.loss_and_grad(&x, &labels);
        let params = model.flat_params();
        let h = 1e-5;
        let step = (params.len() / 80).max(1);
        for i in (0..params.len()).step_by(step) {
            let mut plus = params.clone();
            plus[i] += h;
            model.set_flat_params(&plus).unwrap();
            let lp = model.loss(&x, &labels);
            let mut minus = params.clone();
            minus[i] -= h;
            model.set_flat_params(&minus).unwrap();
            let lm = model.loss(&x, &labels);
            model.set_flat_params(&params).unwrap();
            let numeric = (lp - lm) / (2.0 * h);
            let denom = numeric.abs().max(analytic[i].abs()).max(1e-8);
            assert!(
                (numeric - analytic[i]).abs() / denom < 1e-4,
                "param {}: analytic {} vs numeric {}",
                i,
                analytic[i],
                numeric
            );
        }
    }
    pass(11, "gradient checks");
}

#[test]
fn criterion_12_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_tactip");
    let root = tempfile::tempdir().unwrap();
    let script = root.path().join("script.txt");
    std::fs::write(
        &script,
        "surface=lego\nidle 2\npress 0.5 8\nshear 1,0 1 6\nrelease 4\n",
    )
    .unwrap();

    let run = |label: &str| -> Vec<(String, Vec<u8>)> {
        let dir = root.path().join(label);
        let out = |sub: &str| dir.join(sub);
        let ok = |status: std::process::ExitStatus| assert!(status.success());
        let cmd = |args: &[&str]| {
            let status = std::process::Command::new(bin)
                .args(args)
                .status()
                .unwrap();
            ok(status);
        };
        cmd(&[
            "simulate",
            "--script",
            script.to_str().unwrap(),
            "--seed",
            "7",
            "-o",
            out("sim").to_str().unwrap(),
        ]);
        cmd(&[
            "preprocess",
            "--input",
            out("sim/frames.tacf").to_str().unwrap(),
            "-o",
            out("pre").to_str().unwrap(),
        ]);
        cmd(&[
            "contact",
            "--input",
            out("sim/frames.tacf").to_str().unwrap(),
            "-o",
            out("con").to_str().unwrap(),
        ]);
        cmd(&[
            "train-markers",
            "--frames",
            out("sim/frames.tacf").to_str().unwrap(),
            "--labels",
            out("sim/labels.txt").to_str().unwrap(),
            "-o",
            out("mk").to_str().unwrap(),
        ]);
        cmd(&[
            "track",
            "--input",
            out("sim/frames.tacf").to_str().unwrap(),
            "--model",
            out("mk/markers.tacr").to_str().unwrap(),
            "-o",
            out("trk").to_str().unwrap(),
        ]);
        cmd(&[
            "plot",
            "--input",
            out("con/contact.csv").to_str().unwrap(),
            "--output",
            out("contact.svg").to_str().unwrap(),
        ]);
        let mut outputs = Vec::new();
        for rel in [
            "sim/frames.tacf",
            "sim/labels.txt",
            "sim/manifest.csv",
            "pre/processed.tacf",
            "pre/centroids.txt",
            "pre/centroid_counts.csv",
            "con/contact.csv",
            "mk/markers.tacr",
            "trk/tracks.txt",
            "trk/vectors.csv",
            "contact.svg",
        ] {
            outputs.push((rel.to_string(), std::fs::read(dir.join(rel)).unwrap()));
        }
        outputs
    };

    let a = run("a");
    let b = run("b");
    for ((name, bytes_a), (_, bytes_b)) in a.iter().zip(b.iter()) {
        assert_eq!(bytes_a, bytes_b, "{} differs between identical reruns", name);
    }
    pass(12, "CLI pipeline determinism");
}
