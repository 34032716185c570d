//! Command-line front end for the tactile pipeline. Every subcommand is
//! seeded and deterministic: identical flags give byte-identical outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use tactip_core::classify::{
    save_classifier, t_sweep, train_sgd, Architecture, Classifier, SplitData, TrainConfig,
    CNN_HIDDEN, DEFAULT_DROPOUT,
};
use tactip_core::contact::ForceGrid;
use tactip_core::datasets::{load_container, save_container, Manifest, ManifestRow};
use tactip_core::imagery::{adaptive_threshold, extract_centroids, remove_large_blobs, GrayFrame};
use tactip_core::pressure::{
    magnitude_sum, predict_pressure, save_pressure_dataset, save_pressure_model,
    train_pressure_model,
};
use tactip_core::simulator::{
    run_script, surface_split, synthesize_press_dataset, temporal_split, texture_split,
    SensorConfig, StimulusScript, SurfaceKind,
};
use tactip_core::tracking::{
    average_vector, load_labels, load_marker_model, model_vector_field, predict_markers,
    save_labels, save_marker_model, train_marker_model, AugmentSpec,
};
use tactip_core::{Error, Result};

#[derive(Parser)]
#[command(name = "tactip", version, about = "Optical tactile sensing pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Classification experiment generated by the built-in sensor simulator.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum Task {
    /// Studded vs featureless surface, image stacks (CNN).
    LegoSmooth,
    /// Fine-grained vs featureless surface, image stacks (CNN).
    ConcreteSmooth,
    /// soft / hard / slippery / no-touch, vector stacks (FNN).
    Surfaces,
    /// Alternating vs held offset; only temporal context separates them.
    Temporal,
}

#[derive(Subcommand)]
enum Command {
    /// Run a stimulus script and write frames, marker labels and a manifest
    Simulate {
        /// Stimulus script path (surface=..., then idle/press/shear/release lines)
        #[arg(long)]
        script: PathBuf,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Disable the rendered glare spot
        #[arg(long, default_value_t = false)]
        no_glare: bool,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Threshold frames, drop oversized blobs, extract centroids
    Preprocess {
        /// Input frame container
        #[arg(long)]
        input: PathBuf,
        /// Adaptive threshold window (odd)
        #[arg(long, default_value_t = 15)]
        window: u32,
        /// Threshold offset above local mean
        #[arg(long, default_value_t = 10.0)]
        offset: f64,
        /// Largest blob kept, in pixels
        #[arg(long, default_value_t = 100)]
        max_blob: usize,
        /// Smallest blob reported as a centroid
        #[arg(long, default_value_t = 5)]
        min_area: usize,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Accumulating receptive-field contact detection over a container
    Contact {
        /// Input frame container
        #[arg(long)]
        input: PathBuf,
        /// Grid cells per side (g)
        #[arg(long, default_value_t = 5)]
        grid: u32,
        /// Temporal dampener subtracted each update
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Total activation that counts as contact
        #[arg(long, default_value_t = 5.0)]
        threshold: f64,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Predict the fixed 133-marker layout per frame and derive vectors
    Track {
        /// Input frame container
        #[arg(long)]
        input: PathBuf,
        /// Trained marker model
        #[arg(long)]
        model: PathBuf,
        /// Adaptive threshold window (odd)
        #[arg(long, default_value_t = 15)]
        window: u32,
        /// Threshold offset above local mean
        #[arg(long, default_value_t = 10.0)]
        offset: f64,
        /// Largest blob kept, in pixels
        #[arg(long, default_value_t = 100)]
        max_blob: usize,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Fit the ridge marker localizer on labelled frames
    TrainMarkers {
        /// Frame container with training imagery
        #[arg(long)]
        frames: PathBuf,
        /// Marker labels (frame index + 133 x,y pairs per line)
        #[arg(long)]
        labels: PathBuf,
        /// Ridge penalty
        #[arg(long, default_value_t = 150.0)]
        alpha: f64,
        /// Downsampled feature image side
        #[arg(long, default_value_t = 64)]
        side: u32,
        /// Adaptive threshold window (odd)
        #[arg(long, default_value_t = 15)]
        window: u32,
        /// Threshold offset above local mean
        #[arg(long, default_value_t = 10.0)]
        offset: f64,
        /// Largest blob kept, in pixels
        #[arg(long, default_value_t = 100)]
        max_blob: usize,
        /// Skip translation/zoom augmentation
        #[arg(long, default_value_t = false)]
        no_augment: bool,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Synthesize a press dataset and fit the ridge pressure regressor
    TrainPressure {
        /// Simulated press trials
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Ridge penalty
        #[arg(long, default_value_t = 150.0)]
        alpha: f64,
        /// Fraction of trials held out
        #[arg(long, default_value_t = 0.25)]
        test_fraction: f64,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Train a surface classifier on simulator-generated stacks
    TrainClassifier {
        /// Which experiment to generate
        #[arg(long, value_enum)]
        task: Task,
        /// Frames per stack (temporal context)
        #[arg(long, default_value_t = 10)]
        t: usize,
        /// Training trials per class
        #[arg(long, default_value_t = 40)]
        train_trials: usize,
        /// Held-out trials per class
        #[arg(long, default_value_t = 10)]
        test_trials: usize,
        /// SGD epochs
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        /// SGD learning rate
        #[arg(long, default_value_t = 0.05)]
        lr: f64,
        /// SGD minibatch size
        #[arg(long, default_value_t = 32)]
        batch: usize,
        /// Mean-pool factor for image stacks
        #[arg(long, default_value_t = 4)]
        pool: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Evaluate a saved classifier on a freshly generated test split
    Eval {
        /// Saved classifier model
        #[arg(long)]
        model: PathBuf,
        /// Which experiment to regenerate
        #[arg(long, value_enum)]
        task: Task,
        /// Frames per stack (must match the model)
        #[arg(long, default_value_t = 10)]
        t: usize,
        /// Held-out trials per class
        #[arg(long, default_value_t = 20)]
        test_trials: usize,
        /// Mean-pool factor for image stacks
        #[arg(long, default_value_t = 4)]
        pool: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Accuracy vs temporal context T, averaged over seeded trials
    SweepT {
        /// Which experiment to sweep (vector tasks only)
        #[arg(long, value_enum, default_value_t = Task::Temporal)]
        task: Task,
        /// Smallest T
        #[arg(long, default_value_t = 1)]
        tmin: usize,
        /// Largest T
        #[arg(long, default_value_t = 10)]
        tmax: usize,
        /// Trials per T
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Training trials per class within each trial
        #[arg(long, default_value_t = 30)]
        train_trials: usize,
        /// Held-out trials per class within each trial
        #[arg(long, default_value_t = 15)]
        test_trials: usize,
        /// SGD epochs per training
        #[arg(long, default_value_t = 400)]
        epochs: usize,
        /// SGD learning rate
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Render a CSV (x,y[,err] with header) as an SVG chart
    Plot {
        /// Input CSV
        #[arg(long)]
        input: PathBuf,
        /// line connects points and draws error bars; scatter does not
        #[arg(long, default_value = "line")]
        kind: String,
        /// Chart title
        #[arg(long, default_value = "")]
        title: String,
        /// X axis label
        #[arg(long, default_value = "x")]
        x_label: String,
        /// Y axis label
        #[arg(long, default_value = "y")]
        y_label: String,
        /// Output SVG path
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code for usage errors is 2; this tool
            // reserves 2 for data errors, so remap while keeping help
            // and version on stdout with code 0.
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{}", e);
                std::process::exit(0);
            }
            eprint!("{}", e);
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e);
        std::process::exit(e.exit_code());
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn preprocess_frame(
    frame: &GrayFrame,
    window: u32,
    offset: f64,
    max_blob: usize,
) -> Result<tactip_core::imagery::BinaryFrame> {
    let binary = adaptive_threshold(frame, window, offset)?;
    remove_large_blobs(&binary, max_blob)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            script,
            seed,
            no_glare,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let script = StimulusScript::load(&script)?;
            let config = if no_glare {
                SensorConfig::default()
            } else {
                SensorConfig::default().with_glare()
            };
            let (truths, frames) = run_script(&script, &config, seed, true)?;
            save_container(&frames, &out_dir.join("frames.tacf"))?;
            let labels: Vec<(u64, Vec<(f64, f64)>)> = truths
                .iter()
                .map(|t| (t.frame_index, t.positions.clone()))
                .collect();
            save_labels(&labels, &out_dir.join("labels.txt"))?;
            let surface = script.surface.kind.as_str();
            let manifest = Manifest {
                rows: truths
                    .iter()
                    .map(|t| ManifestRow {
                        frame_index: t.frame_index,
                        label: tactip_core::datasets::Label::parse(if t.contact {
                            surface
                        } else {
                            "no_touch"
                        })
                        .expect("surface kinds are valid labels"),
                        pressure: Some(t.force),
                        contact: t.contact,
                        trial_id: 0,
                    })
                    .collect(),
            };
            manifest.save(&out_dir.join("manifest.csv"))?;
            println!("wrote {} frames to {}", frames.len(), out_dir.display());
            Ok(())
        }
        Command::Preprocess {
            input,
            window,
            offset,
            max_blob,
            min_area,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let frames = load_container(&input)?;
            let mut processed = Vec::with_capacity(frames.len());
            let mut centroid_rows: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
            let mut counts = String::from("frame_index,centroids\n");
            for frame in &frames {
                let cleaned = preprocess_frame(frame, window, offset, max_blob)?;
                let markers = extract_centroids(&cleaned, min_area)?;
                writeln!(counts, "{},{}", frame.timestamp, markers.points.len()).unwrap();
                centroid_rows.push((frame.timestamp, markers.points));
                processed.push(cleaned.to_gray(frame.timestamp));
            }
            save_container(&processed, &out_dir.join("processed.tacf"))?;
            save_labels(&centroid_rows, &out_dir.join("centroids.txt"))?;
            write_text(&out_dir.join("centroid_counts.csv"), &counts)?;
            println!("preprocessed {} frames", frames.len());
            Ok(())
        }
        Command::Contact {
            input,
            grid,
            gamma,
            threshold,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let frames = load_container(&input)?;
            let mut iter = frames.into_iter();
            let first = iter
                .next()
                .ok_or_else(|| Error::Data("container has no frames".into()))?;
            let first_index = first.timestamp;
            let mut grid = ForceGrid::new(first, grid, gamma)?;
            let mut csv = String::from("frame_index,total_activation,contact\n");
            writeln!(csv, "{},0,0", first_index).unwrap();
            for frame in iter {
                let index = frame.timestamp;
                grid.update(frame)?;
                let (contact, total) = grid.contact_detected(threshold)?;
                writeln!(csv, "{},{},{}", index, total, contact as u8).unwrap();
            }
            write_text(&out_dir.join("contact.csv"), &csv)?;
            println!("contact trace written");
            Ok(())
        }
        Command::Track {
            input,
            model,
            window,
            offset,
            max_blob,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let model = load_marker_model(&model)?;
            let frames = load_container(&input)?;
            if frames.is_empty() {
                return Err(Error::Data("container has no frames".into()));
            }
            let mut reference = None;
            let mut tracks: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
            let mut vectors = String::from("frame_index,avg_dx,avg_dy,magnitude_sum\n");
            for frame in &frames {
                let cleaned = preprocess_frame(frame, window, offset, max_blob)?;
                let markers = predict_markers(&model, &cleaned);
                let reference = reference.get_or_insert_with(|| markers.clone());
                let field = model_vector_field(reference, &markers)?;
                let (ax, ay) = average_vector(&field)?;
                writeln!(
                    vectors,
                    "{},{},{},{}",
                    frame.timestamp,
                    ax,
                    ay,
                    magnitude_sum(&field)
                )
                .unwrap();
                tracks.push((frame.timestamp, markers.points));
            }
            save_labels(&tracks, &out_dir.join("tracks.txt"))?;
            write_text(&out_dir.join("vectors.csv"), &vectors)?;
            println!("tracked {} frames x {} markers", frames.len(), model.marker_count);
            Ok(())
        }
        Command::TrainMarkers {
            frames,
            labels,
            alpha,
            side,
            window,
            offset,
            max_blob,
            no_augment,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let frames = load_container(&frames)?;
            let labels = load_labels(&labels)?;
            let mut samples = Vec::new();
            for frame in &frames {
                let Some((_, points)) = labels.iter().find(|(i, _)| *i == frame.timestamp) else {
                    continue;
                };
                let cleaned = preprocess_frame(frame, window, offset, max_blob)?;
                samples.push((cleaned, points.clone()));
            }
            let augment = if no_augment {
                AugmentSpec::none()
            } else {
                AugmentSpec::default()
            };
            let model = train_marker_model(&samples, alpha, &augment, side)?;
            save_marker_model(&model, &out_dir.join("markers.tacr"))?;
            println!("marker model trained on {} labelled frames", samples.len());
            Ok(())
        }
        Command::TrainPressure {
            trials,
            alpha,
            test_fraction,
            seed,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            if !(0.0..1.0).contains(&test_fraction) {
                return Err(Error::Parameter(format!(
                    "test fraction {} outside [0, 1)",
                    test_fraction
                )));
            }
            let config = SensorConfig {
                jitter_noise_std: 0.15,
                ..SensorConfig::default()
            };
            let samples = synthesize_press_dataset(&config, trials, seed)?;
            save_pressure_dataset(&samples, &out_dir.join("dataset.txt"))?;
            let test_len = (samples.len() as f64 * test_fraction).ceil() as usize;
            let (test, train) = samples.split_at(test_len);
            let model = train_pressure_model(train, alpha)?;
            save_pressure_model(&model, &out_dir.join("pressure.model"))?;
            let mut eval = String::from("true_pressure,predicted,magnitude_sum\n");
            let mut mae = 0.0;
            for s in test {
                let predicted = predict_pressure(&model, &s.vectors)?;
                mae += (predicted - s.pressure).abs();
                writeln!(
                    eval,
                    "{},{},{}",
                    s.pressure,
                    predicted,
                    magnitude_sum(&s.vectors)
                )
                .unwrap();
            }
            write_text(&out_dir.join("eval.csv"), &eval)?;
            println!("held-out MAE: {}", mae / test.len().max(1) as f64);
            Ok(())
        }
        Command::TrainClassifier {
            task,
            t,
            train_trials,
            test_trials,
            epochs,
            lr,
            batch,
            pool,
            seed,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let data = build_task(task, t, train_trials, test_trials, pool, seed)?;
            let arch = task_architecture(task, t, pool, data.train_x.ncols());
            let mut model = Classifier::new(arch, seed)?;
            let config = TrainConfig {
                epochs,
                learning_rate: lr,
                batch,
                seed,
            };
            let curve = train_sgd(&mut model, &data.train_x, &data.train_y, &config)?;
            save_classifier(&mut model, &out_dir.join("model.tacn"))?;
            let mut csv = String::from("epoch,loss,train_accuracy\n");
            for (i, (l, a)) in curve.loss.iter().zip(curve.accuracy.iter()).enumerate() {
                writeln!(csv, "{},{},{}", i, l, a).unwrap();
            }
            write_text(&out_dir.join("curve.csv"), &csv)?;
            let test_acc = model.evaluate(&data.test_x, &data.test_y)?;
            println!(
                "train accuracy: {}  test accuracy: {}",
                curve.accuracy.last().unwrap(),
                test_acc
            );
            Ok(())
        }
        Command::Eval {
            model,
            task,
            t,
            test_trials,
            pool,
            seed,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let mut model = tactip_core::classify::load_classifier(&model)?;
            let data = build_task(task, t, 0, test_trials, pool, seed)?;
            let mut csv = String::from("index,true_label,predicted\n");
            let mut correct = 0usize;
            for (i, &label) in data.test_y.iter().enumerate() {
                let row: Vec<f64> = data.test_x.row(i).iter().copied().collect();
                let (predicted, _) = model.predict(&row)?;
                if predicted == label {
                    correct += 1;
                }
                writeln!(csv, "{},{},{}", i, label, predicted).unwrap();
            }
            write_text(&out_dir.join("eval.csv"), &csv)?;
            println!(
                "accuracy: {}",
                correct as f64 / data.test_y.len().max(1) as f64
            );
            Ok(())
        }
        Command::SweepT {
            task,
            tmin,
            tmax,
            trials,
            train_trials,
            test_trials,
            epochs,
            lr,
            seed,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            if tmin < 1 || tmax < tmin {
                return Err(Error::Parameter(format!(
                    "invalid T range {}..{}",
                    tmin, tmax
                )));
            }
            if !matches!(task, Task::Temporal | Task::Surfaces) {
                return Err(Error::Parameter(
                    "sweep-t supports the vector tasks: temporal, surfaces".into(),
                ));
            }
            let t_values: Vec<usize> = (tmin..=tmax).collect();
            let threads = std::env::var("TACTIP_LAB_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&v| v >= 1)
                .unwrap_or(1);
            let train_config = TrainConfig {
                epochs,
                learning_rate: lr,
                batch: 16,
                seed,
            };
            let (hidden, classes) = task_sweep_shape(task);
            let sweep_one = |t: usize| {
                t_sweep(
                    |t, s| build_sweep_task(task, t, train_trials, test_trials, s),
                    &[t],
                    trials,
                    hidden,
                    &train_config,
                    classes,
                    seed,
                )
                .map(|mut v| v.remove(0))
            };
            // Worker pool over T values; results are collected by index so
            // the output order never depends on scheduling.
            let points: Vec<tactip_core::classify::SweepPoint> = if threads <= 1 {
                t_values
                    .iter()
                    .map(|&t| sweep_one(t))
                    .collect::<Result<_>>()?
            } else {
                let results: Vec<std::sync::Mutex<Option<Result<_>>>> =
                    t_values.iter().map(|_| std::sync::Mutex::new(None)).collect();
                let next = std::sync::atomic::AtomicUsize::new(0);
                std::thread::scope(|scope| {
                    for _ in 0..threads.min(t_values.len()) {
                        scope.spawn(|| loop {
                            let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                            if i >= t_values.len() {
                                break;
                            }
                            *results[i].lock().unwrap() = Some(sweep_one(t_values[i]));
                        });
                    }
                });
                results
                    .into_iter()
                    .map(|m| m.into_inner().unwrap().expect("worker finished"))
                    .collect::<Result<_>>()?
            };
            let mut csv = String::from("t,mean_accuracy,std_accuracy\n");
            for p in &points {
                writeln!(csv, "{},{},{}", p.t, p.mean, p.std).unwrap();
            }
            write_text(&out_dir.join("sweep.csv"), &csv)?;
            println!("swept T={}..{} over {} trials each", tmin, tmax, trials);
            Ok(())
        }
        Command::Plot {
            input,
            kind,
            title,
            x_label,
            y_label,
            output,
        } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::io(&input, e))?;
            let mut points = Vec::new();
            let mut errors = Vec::new();
            for (i, line) in text.lines().enumerate().skip(1) {
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() < 2 {
                    return Err(Error::Data(format!("line {}: need x,y columns", i + 1)));
                }
                let parse = |v: &str| -> Result<f64> {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Data(format!("line {}: bad number '{}'", i + 1, v)))
                };
                points.push((parse(fields[0])?, parse(fields[1])?));
                errors.push(if fields.len() > 2 { parse(fields[2])? } else { 0.0 });
            }
            let series = [tactip_core::plot::Series {
                label: "data",
                points,
                errors,
            }];
            let svg = match kind.as_str() {
                "line" => tactip_core::plot::line_svg(&title, &x_label, &y_label, &series)?,
                "scatter" => tactip_core::plot::scatter_svg(&title, &x_label, &y_label, &series)?,
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown plot kind '{}' (line|scatter)",
                        other
                    )))
                }
            };
            tactip_core::plot::write_svg(&svg, &output)?;
            println!("plot written to {}", output.display());
            Ok(())
        }
    }
}

fn build_task(
    task: Task,
    t: usize,
    train_trials: usize,
    test_trials: usize,
    pool: usize,
    seed: u64,
) -> Result<SplitData> {
    match task {
        Task::LegoSmooth => texture_split(
            &[SurfaceKind::Lego, SurfaceKind::SmoothWood],
            train_trials,
            test_trials,
            t,
            pool,
            seed,
        ),
        Task::ConcreteSmooth => texture_split(
            &[SurfaceKind::Concrete, SurfaceKind::SmoothWood],
            train_trials,
            test_trials,
            t,
            pool,
            seed,
        ),
        Task::Surfaces => surface_split(train_trials, test_trials, t, seed),
        Task::Temporal => temporal_split(train_trials, test_trials, t, 0.9, 0.65, seed),
    }
}

fn build_sweep_task(
    task: Task,
    t: usize,
    train_trials: usize,
    test_trials: usize,
    seed: u64,
) -> Result<SplitData> {
    build_task(task, t, train_trials, test_trials, 4, seed)
}

fn task_architecture(task: Task, t: usize, pool: usize, input_len: usize) -> Architecture {
    match task {
        Task::LegoSmooth | Task::ConcreteSmooth => Architecture::Cnn {
            in_rows: (128 / pool) * t,
            in_cols: 128 / pool,
            filters: 8,
            stride: 4,
            hidden: CNN_HIDDEN,
            classes: 2,
            dropout: DEFAULT_DROPOUT,
        },
        Task::Surfaces => Architecture::Fnn {
            input: input_len,
            hidden: (256, 64),
            classes: 4,
            dropout: DEFAULT_DROPOUT,
        },
        Task::Temporal => Architecture::Fnn {
            input: input_len,
            hidden: (16, 8),
            classes: 2,
            dropout: DEFAULT_DROPOUT,
        },
    }
}

fn task_sweep_shape(task: Task) -> ((usize, usize), usize) {
    match task {
        Task::Surfaces => ((64, 32), 4),
        _ => ((16, 8), 2),
    }
}
