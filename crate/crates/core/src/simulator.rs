//! Deterministic synthetic tactile sensor.
//!
//! Replaces the physical data-collection rig: renders the white marker
//! layout under scripted presses, shears, slips and texture vibration,
//! and exposes per-frame ground truth (marker positions, contact force,
//! displacement) so every downstream stage can be validated closed-loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imagery::{GrayFrame, MarkerSet};
use crate::pressure::{PressureSample, PressureSurface};
use crate::tracking::VectorField;

/// Bright reflection blob burned into rendered frames.
#[derive(Debug, Clone, Copy)]
pub struct GlareSpec {
    pub x: f64,
    pub y: f64,
    /// Approximate pixel area of the rendered spot.
    pub area: f64,
}

impl GlareSpec {
    pub fn radius(&self) -> f64 {
        (self.area / std::f64::consts::PI).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SensorConfig {
    pub width: u32,
    pub height: u32,
    pub marker_count: usize,
    pub marker_radius: f64,
    pub glare: Option<GlareSpec>,
    /// Gaussian pixel noise (grayscale units) added at render time.
    pub pixel_noise_std: f64,
    /// Per-marker, per-frame measurement jitter (pixels).
    pub jitter_noise_std: f64,
    /// Per-trial absolute error on commanded depth (cm).
    pub actuation_noise_std: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            width: 128,
            height: 128,
            marker_count: 133,
            marker_radius: 3.0,
            glare: None,
            pixel_noise_std: 0.0,
            jitter_noise_std: 0.0,
            actuation_noise_std: 0.0,
        }
    }
}

impl SensorConfig {
    pub fn with_glare(mut self) -> Self {
        self.glare = Some(GlareSpec {
            x: self.width as f64 * 0.68,
            y: self.height as f64 * 0.3,
            area: 250.0,
        });
        self
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.width - 1) as f64 / 2.0,
            (self.height - 1) as f64 / 2.0,
        )
    }

    /// Hexagonal rest layout: lattice points closest to the image center,
    /// exactly `marker_count` of them, all at least two radii from the
    /// border.
    pub fn rest_layout(&self) -> Result<Vec<(f64, f64)>> {
        let (cx, cy) = self.center();
        let margin = 2.0 * self.marker_radius;
        let max_r = (self.width.min(self.height) as f64) / 2.0 - margin - 1.0;
        let spacing = hex_spacing_for(self.marker_count, max_r);
        let row_h = spacing * 3f64.sqrt() / 2.0;
        let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
        let rows = (max_r / row_h).ceil() as i32 + 1;
        let cols = (max_r / spacing).ceil() as i32 + 1;
        for j in -rows..=rows {
            let y = j as f64 * row_h;
            let x_off = if j.rem_euclid(2) == 1 { spacing / 2.0 } else { 0.0 };
            for i in -cols..=cols {
                let x = i as f64 * spacing + x_off;
                let d2 = x * x + y * y;
                let px = cx + x;
                let py = cy + y;
                if px >= margin
                    && px <= (self.width - 1) as f64 - margin
                    && py >= margin
                    && py <= (self.height - 1) as f64 - margin
                {
                    candidates.push((d2, px, py));
                }
            }
        }
        if candidates.len() < self.marker_count {
            return Err(Error::Parameter(format!(
                "sensor {}x{} cannot hold {} markers at radius {}",
                self.width, self.height, self.marker_count, self.marker_radius
            )));
        }
        candidates.sort_by(|a, b| {
            (a.0, a.2, a.1)
                .partial_cmp(&(b.0, b.2, b.1))
                .expect("finite layout")
        });
        Ok(candidates[..self.marker_count]
            .iter()
            .map(|&(_, x, y)| (x, y))
            .collect())
    }
}

fn hex_spacing_for(count: usize, max_r: f64) -> f64 {
    // Pack `count` hex cells into the available disc with ~15% headroom.
    let area = std::f64::consts::PI * max_r * max_r;
    (area / (count as f64 * 1.15) / (3f64.sqrt() / 2.0)).sqrt()
}

/// Per-marker jitter pattern excited by surface texture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterPattern {
    /// No texture signal.
    None,
    /// Independent Gaussian shake per marker per frame (fine grain).
    RandomFine,
    /// Spatially coherent travelling wave (coarse periodic studs).
    CoarsePeriodic,
    /// Whole-field offset flipping sign every frame.
    Alternating,
    /// Whole-field offset held constant for the trial, sign random.
    Held,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Hard,
    Soft,
    Slippery,
    Lego,
    Concrete,
    SmoothWood,
}

impl SurfaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceKind::Hard => "hard",
            SurfaceKind::Soft => "soft",
            SurfaceKind::Slippery => "slippery",
            SurfaceKind::Lego => "lego",
            SurfaceKind::Concrete => "concrete",
            SurfaceKind::SmoothWood => "smooth_wood",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "hard" => SurfaceKind::Hard,
            "soft" => SurfaceKind::Soft,
            "slippery" => SurfaceKind::Slippery,
            "lego" => SurfaceKind::Lego,
            "concrete" => SurfaceKind::Concrete,
            "smooth_wood" => SurfaceKind::SmoothWood,
            other => return Err(Error::Data(format!("unknown surface '{}'", other))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    /// Displacement attenuation per unit depth; 0 = rigid, 1 = fully giving.
    pub compliance: f64,
    /// Fraction of commanded lateral motion transferred to the markers.
    pub slip_coupling: f64,
    /// Texture jitter amplitude (pixels).
    pub texture_amp: f64,
    /// Spatial period (pixels) for coherent jitter patterns.
    pub texture_period: f64,
    pub jitter: JitterPattern,
}

impl SurfaceSpec {
    pub fn preset(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::Hard => SurfaceSpec {
                kind,
                compliance: 0.0,
                slip_coupling: 1.0,
                texture_amp: 0.0,
                texture_period: 0.0,
                jitter: JitterPattern::None,
            },
            SurfaceKind::Soft => SurfaceSpec {
                kind,
                compliance: 0.5,
                slip_coupling: 0.9,
                texture_amp: 0.0,
                texture_period: 0.0,
                jitter: JitterPattern::None,
            },
            SurfaceKind::Slippery => SurfaceSpec {
                kind,
                compliance: 0.0,
                slip_coupling: 0.2,
                texture_amp: 0.0,
                texture_period: 0.0,
                jitter: JitterPattern::None,
            },
            SurfaceKind::Lego => SurfaceSpec {
                kind,
                compliance: 0.0,
                slip_coupling: 1.0,
                texture_amp: 2.5,
                texture_period: 24.0,
                jitter: JitterPattern::CoarsePeriodic,
            },
            SurfaceKind::Concrete => SurfaceSpec {
                kind,
                compliance: 0.0,
                slip_coupling: 1.0,
                texture_amp: 0.8,
                texture_period: 0.0,
                jitter: JitterPattern::RandomFine,
            },
            SurfaceKind::SmoothWood => SurfaceSpec {
                kind,
                compliance: 0.0,
                slip_coupling: 1.0,
                texture_amp: 0.0,
                texture_period: 0.0,
                jitter: JitterPattern::None,
            },
        }
    }

    /// A hard surface whose only signal is temporal: per-frame whole-field
    /// offsets with identical single-frame statistics across patterns.
    pub fn temporal_probe(pattern: JitterPattern, amp: f64) -> Self {
        SurfaceSpec {
            kind: SurfaceKind::Hard,
            compliance: 0.0,
            slip_coupling: 1.0,
            texture_amp: amp,
            texture_period: 0.0,
            jitter: pattern,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Idle,
    /// Commanded depth in cm, within [0, 1].
    Press { depth: f64 },
    /// Unit direction and commanded speed in px/frame.
    Shear { dir: (f64, f64), speed: f64 },
    Release,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptStep {
    pub frames: u32,
    pub action: Action,
}

#[derive(Debug, Clone)]
pub struct StimulusScript {
    pub surface: SurfaceSpec,
    pub steps: Vec<ScriptStep>,
}

impl StimulusScript {
    pub fn new(surface: SurfaceSpec, steps: Vec<ScriptStep>) -> Self {
        StimulusScript { surface, steps }
    }

    pub fn total_frames(&self) -> u32 {
        self.steps.iter().map(|s| s.frames).sum()
    }

    /// Line format:
    /// ```text
    /// surface=lego
    /// idle 10
    /// press 0.4 30
    /// shear 1,0 2 60
    /// release 20
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut surface = None;
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Script {
                line: lineno + 1,
                reason,
            };
            if let Some(rest) = line.strip_prefix("surface=") {
                surface = Some(SurfaceSpec::preset(SurfaceKind::parse(rest.trim()).map_err(
                    |_| err(format!("unknown surface '{}'", rest.trim())),
                )?));
                continue;
            }
            let mut parts = line.split_whitespace();
            let verb = parts.next().unwrap();
            let step = match verb {
                "idle" => {
                    let frames = parse_frames(parts.next(), lineno)?;
                    ScriptStep {
                        frames,
                        action: Action::Idle,
                    }
                }
                "press" => {
                    let depth: f64 = parts
                        .next()
                        .ok_or_else(|| err("press needs a depth".into()))?
                        .parse()
                        .map_err(|_| err("bad press depth".into()))?;
                    if !(0.0..=1.0).contains(&depth) {
                        return Err(err(format!("depth {} outside [0, 1]", depth)));
                    }
                    let frames = parse_frames(parts.next(), lineno)?;
                    ScriptStep {
                        frames,
                        action: Action::Press { depth },
                    }
                }
                "shear" => {
                    let dir_text = parts
                        .next()
                        .ok_or_else(|| err("shear needs a direction".into()))?;
                    let mut comps = dir_text.split(',');
                    let dx: f64 = comps
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err("bad shear direction".into()))?;
                    let dy: f64 = comps
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err("bad shear direction".into()))?;
                    let norm = (dx * dx + dy * dy).sqrt();
                    if norm == 0.0 {
                        return Err(err("shear direction must be nonzero".into()));
                    }
                    let speed: f64 = parts
                        .next()
                        .ok_or_else(|| err("shear needs a speed".into()))?
                        .parse()
                        .map_err(|_| err("bad shear speed".into()))?;
                    let frames = parse_frames(parts.next(), lineno)?;
                    ScriptStep {
                        frames,
                        action: Action::Shear {
                            dir: (dx / norm, dy / norm),
                            speed,
                        },
                    }
                }
                "release" => {
                    let frames = parse_frames(parts.next(), lineno)?;
                    ScriptStep {
                        frames,
                        action: Action::Release,
                    }
                }
                other => return Err(err(format!("unknown action '{}'", other))),
            };
            if step.frames == 0 {
                return Err(err("step duration must be >= 1 frame".into()));
            }
            steps.push(step);
        }
        let surface = surface.ok_or(Error::Script {
            line: 0,
            reason: "script must declare surface=<kind>".into(),
        })?;
        Ok(StimulusScript { surface, steps })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn parse_frames(field: Option<&str>, lineno: usize) -> Result<u32> {
    field
        .and_then(|v| v.parse().ok())
        .filter(|&f| f >= 1)
        .ok_or(Error::Script {
            line: lineno + 1,
            reason: "missing or invalid frame count".into(),
        })
}

/// Ground truth for one simulated frame.
#[derive(Debug, Clone)]
pub struct FrameTruth {
    pub frame_index: u64,
    pub positions: Vec<(f64, f64)>,
    /// Displacement from rest per marker (includes texture jitter).
    pub displacement: Vec<(f64, f64)>,
    /// Normalized contact force in [0, 100].
    pub force: f64,
    pub contact: bool,
    pub avg_displacement: (f64, f64),
}

impl FrameTruth {
    pub fn marker_set(&self) -> MarkerSet {
        MarkerSet {
            points: self.positions.clone(),
        }
    }

    pub fn vector_field(&self, rest: &[(f64, f64)]) -> VectorField {
        VectorField {
            vectors: rest
                .iter()
                .zip(self.positions.iter())
                .map(|(&o, &p)| (o, p))
                .collect(),
        }
    }
}

const PRESS_GAIN: f64 = 14.0;
const MAX_SHEAR: f64 = 10.0;
const DEPTH_RATE: f64 = 0.5;
const RELEASE_RATE: f64 = 0.55;
const JITTER_OMEGA: f64 = 0.9;

/// Stateful single-stream simulation. One owner, frames in order.
pub struct Simulation {
    config: SensorConfig,
    surface: SurfaceSpec,
    rest: Vec<(f64, f64)>,
    rng: ChaCha8Rng,
    depth: f64,
    target_depth: f64,
    shear: (f64, f64),
    engaged: bool,
    frame_index: u64,
    /// Per-trial actuation offset applied to every commanded depth.
    depth_offset: f64,
    /// Sign for the held jitter pattern, fixed per trial.
    held_sign: f64,
}

impl Simulation {
    pub fn new(config: SensorConfig, surface: SurfaceSpec, seed: u64) -> Result<Self> {
        let rest = config.rest_layout()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth_offset = gaussian(&mut rng) * config.actuation_noise_std;
        let held_sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        Ok(Simulation {
            config,
            surface,
            rest,
            rng,
            depth: 0.0,
            target_depth: 0.0,
            shear: (0.0, 0.0),
            engaged: false,
            frame_index: 0,
            depth_offset,
            held_sign,
        })
    }

    pub fn rest_layout(&self) -> &[(f64, f64)] {
        &self.rest
    }

    pub fn config(&self) -> &SensorConfig {
        &self.config
    }

    /// Advances one frame under `action` and returns the ground truth.
    pub fn step(&mut self, action: &Action) -> Result<FrameTruth> {
        match *action {
            Action::Idle => {}
            Action::Press { depth } => {
                self.engaged = true;
                self.target_depth = (depth + self.depth_offset).clamp(0.0, 1.2);
            }
            Action::Shear { dir, speed } => {
                if !self.engaged {
                    return Err(Error::Script {
                        line: 0,
                        reason: "shear before press".into(),
                    });
                }
                let coupled = speed * self.surface.slip_coupling;
                let mag = (self.shear.0 * self.shear.0 + self.shear.1 * self.shear.1).sqrt();
                let headroom = (1.0 - mag / MAX_SHEAR).max(0.0);
                self.shear.0 += dir.0 * coupled * headroom;
                self.shear.1 += dir.1 * coupled * headroom;
            }
            Action::Release => {
                self.engaged = false;
                self.target_depth = 0.0;
            }
        }
        if self.engaged {
            self.depth += (self.target_depth - self.depth) * DEPTH_RATE;
        } else {
            self.depth *= RELEASE_RATE;
            self.shear.0 *= RELEASE_RATE;
            self.shear.1 *= RELEASE_RATE;
            if self.depth < 1e-4 {
                self.depth = 0.0;
            }
            if self.shear.0.abs() + self.shear.1.abs() < 1e-4 {
                self.shear = (0.0, 0.0);
            }
        }

        let (cx, cy) = self.config.center();
        let dome_r = (self.config.width.min(self.config.height) as f64) / 2.0;
        let press_scale = self.depth * (1.0 - self.surface.compliance) * PRESS_GAIN;
        let in_contact = self.engaged && self.depth > 1e-3;

        let mut positions = Vec::with_capacity(self.rest.len());
        let mut displacement = Vec::with_capacity(self.rest.len());
        let (mut sum_dx, mut sum_dy) = (0.0, 0.0);
        let t = self.frame_index as f64;
        for i in 0..self.rest.len() {
            let (rx, ry) = self.rest[i];
            let ux = rx - cx;
            let uy = ry - cy;
            let dist = (ux * ux + uy * uy).sqrt();
            let rho = dist / dome_r;
            // Radial membrane bulge: zero at center, peak mid-radius.
            let radial = press_scale * rho * (-rho * rho).exp() * std::f64::consts::E.sqrt();
            let (dirx, diry) = if dist > 1e-9 {
                (ux / dist, uy / dist)
            } else {
                (0.0, 0.0)
            };
            let contact_w = (-(rho * rho)).exp();
            let mut dx = radial * dirx + self.shear.0 * contact_w;
            let mut dy = radial * diry + self.shear.1 * contact_w;
            if in_contact && self.surface.texture_amp > 0.0 {
                let (jx, jy) = self.jitter(i, rx, ry, t);
                dx += jx;
                dy += jy;
            }
            if self.config.jitter_noise_std > 0.0 {
                dx += gaussian(&mut self.rng) * self.config.jitter_noise_std;
                dy += gaussian(&mut self.rng) * self.config.jitter_noise_std;
            }
            sum_dx += dx;
            sum_dy += dy;
            positions.push((rx + dx, ry + dy));
            displacement.push((dx, dy));
        }
        let n = self.rest.len() as f64;
        let force = (100.0 * self.depth * (1.0 - self.surface.compliance)).clamp(0.0, 100.0);
        let truth = FrameTruth {
            frame_index: self.frame_index,
            positions,
            displacement,
            force,
            contact: in_contact,
            avg_displacement: (sum_dx / n, sum_dy / n),
        };
        self.frame_index += 1;
        Ok(truth)
    }

    fn jitter(&mut self, index: usize, rx: f64, ry: f64, t: f64) -> (f64, f64) {
        let amp = self.surface.texture_amp;
        match self.surface.jitter {
            JitterPattern::None => (0.0, 0.0),
            JitterPattern::RandomFine => (
                gaussian(&mut self.rng) * amp,
                gaussian(&mut self.rng) * amp,
            ),
            JitterPattern::CoarsePeriodic => {
                let phase = 2.0 * std::f64::consts::PI * (rx + ry) / self.surface.texture_period;
                let _ = index;
                (
                    amp * (phase + JITTER_OMEGA * t).sin(),
                    0.5 * amp * (1.7 * phase + JITTER_OMEGA * t + 1.3).sin(),
                )
            }
            JitterPattern::Alternating => {
                // Random per-trial phase keeps the single-frame marginal
                // identical to the held pattern; only the flip is a cue.
                let parity = if (self.frame_index % 2) == 0 { 1.0 } else { -1.0 };
                (amp * parity * self.held_sign, 0.0)
            }
            JitterPattern::Held => (amp * self.held_sign, 0.0),
        }
    }

    /// Renders marker positions as anti-aliased white discs, plus the
    /// configured glare spot and pixel noise.
    pub fn render(&mut self, truth: &FrameTruth) -> GrayFrame {
        let (w, h) = (self.config.width as usize, self.config.height as usize);
        let mut canvas = vec![10.0f64; w * h];
        let r = self.config.marker_radius;
        for &(px, py) in &truth.positions {
            stamp_disc(&mut canvas, w, h, px, py, r, 255.0);
        }
        if let Some(glare) = self.config.glare {
            stamp_disc(&mut canvas, w, h, glare.x, glare.y, glare.radius(), 240.0);
        }
        let noise = self.config.pixel_noise_std;
        let data = canvas
            .into_iter()
            .map(|v| {
                let v = if noise > 0.0 {
                    v + gaussian(&mut self.rng) * noise
                } else {
                    v
                };
                v.clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayFrame {
            width: self.config.width,
            height: self.config.height,
            data,
            timestamp: truth.frame_index,
        }
    }
}

fn stamp_disc(canvas: &mut [f64], w: usize, h: usize, cx: f64, cy: f64, r: f64, level: f64) {
    let x0 = ((cx - r - 1.0).floor().max(0.0)) as usize;
    let x1 = ((cx + r + 1.0).ceil().min((w - 1) as f64)) as usize;
    let y0 = ((cy - r - 1.0).floor().max(0.0)) as usize;
    let y1 = ((cy + r + 1.0).ceil().min((h - 1) as f64)) as usize;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let coverage = (r - d + 0.5).clamp(0.0, 1.0);
            if coverage > 0.0 {
                let cell = &mut canvas[y * w + x];
                *cell = cell.max(level * coverage);
            }
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Runs a full script, returning per-frame ground truth and, when
/// `render` is set, the rendered frames.
pub fn run_script(
    script: &StimulusScript,
    config: &SensorConfig,
    seed: u64,
    render: bool,
) -> Result<(Vec<FrameTruth>, Vec<GrayFrame>)> {
    let mut sim = Simulation::new(config.clone(), script.surface.clone(), seed)?;
    let mut truths = Vec::with_capacity(script.total_frames() as usize);
    let mut frames = Vec::new();
    for step in &script.steps {
        for _ in 0..step.frames {
            let truth = sim.step(&step.action)?;
            if render {
                frames.push(sim.render(&truth));
            }
            truths.push(truth);
        }
    }
    Ok((truths, frames))
}

/// Press-and-hold script used by pressure and soft/hard experiments.
pub fn press_hold_script(surface: SurfaceSpec, depth: f64, hold: u32) -> StimulusScript {
    StimulusScript::new(
        surface,
        vec![
            ScriptStep {
                frames: 2,
                action: Action::Idle,
            },
            ScriptStep {
                frames: hold,
                action: Action::Press { depth },
            },
        ],
    )
}

/// Press then steady shear; used by direction and slip experiments.
pub fn press_shear_script(
    surface: SurfaceSpec,
    depth: f64,
    dir: (f64, f64),
    speed: f64,
    shear_frames: u32,
) -> StimulusScript {
    StimulusScript::new(
        surface,
        vec![
            ScriptStep {
                frames: 2,
                action: Action::Idle,
            },
            ScriptStep {
                frames: 10,
                action: Action::Press { depth },
            },
            ScriptStep {
                frames: shear_frames,
                action: Action::Shear { dir, speed },
            },
        ],
    )
}

/// One steady-state pressure sample per trial: press to a random depth
/// with a small random lateral nudge, read the final frame's true
/// displacement field and force.
pub fn synthesize_press_dataset(
    config: &SensorConfig,
    trials: usize,
    seed: u64,
) -> Result<Vec<PressureSample>> {
    let mut samples = Vec::with_capacity(trials);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let soft = rng.gen::<bool>();
        let surface = if soft {
            SurfaceSpec::preset(SurfaceKind::Soft)
        } else {
            SurfaceSpec::preset(SurfaceKind::Hard)
        };
        let depth = rng.gen_range(0.05..1.0);
        let shear_dir = {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (a.cos(), a.sin())
        };
        let shear_speed = rng.gen_range(0.0..1.5);
        let script = StimulusScript::new(
            surface.clone(),
            vec![
                ScriptStep {
                    frames: 10,
                    action: Action::Press { depth },
                },
                ScriptStep {
                    frames: 6,
                    action: Action::Shear {
                        dir: shear_dir,
                        speed: shear_speed,
                    },
                },
            ],
        );
        let (truths, _) = run_script(&script, config, seed ^ (trial as u64).wrapping_mul(0x9e3779b9), false)?;
        let last = truths.last().expect("script has frames");
        let rest = config.rest_layout()?;
        samples.push(PressureSample {
            vectors: last.vector_field(&rest),
            pressure: last.force,
            surface: if soft {
                PressureSurface::Soft
            } else {
                PressureSurface::Hard
            },
        });
    }
    Ok(samples)
}

// ---------------------------------------------------------------------
// Classification experiment builders
// ---------------------------------------------------------------------

use crate::classify::{stack_frames, stack_vectors, FramePixels, SplitData};
use nalgebra::DMatrix;

fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c])
}

fn split_from_rows(
    train: (Vec<Vec<f64>>, Vec<usize>),
    test: (Vec<Vec<f64>>, Vec<usize>),
) -> SplitData {
    SplitData {
        train_x: rows_to_matrix(&train.0),
        train_y: train.1,
        test_x: rows_to_matrix(&test.0),
        test_y: test.1,
    }
}

fn trial_seed(seed: u64, class: usize, trial: usize) -> u64 {
    seed ^ ((class as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15))
        ^ (trial as u64).wrapping_mul(0xd1b54a32d192ed03)
}

/// Renders a press-and-hold trial on `surface` and returns the last `t`
/// preprocessed frames pooled by `pool`, stacked oldest first.
fn texture_stack(
    config: &SensorConfig,
    surface: &SurfaceSpec,
    t: usize,
    pool: usize,
    seed: u64,
) -> Result<FramePixels> {
    let script = press_hold_script(surface.clone(), 0.7, 4 + t as u32);
    let (_, frames) = run_script(&script, config, seed, true)?;
    let mut history = Vec::with_capacity(frames.len());
    for frame in &frames {
        let binary = crate::imagery::adaptive_threshold(frame, 15, 10.0)?;
        let cleaned = crate::imagery::remove_large_blobs(&binary, 100)?;
        history.push(FramePixels::from_binary(&cleaned).pooled(pool)?);
    }
    stack_frames(&history, t)
}

/// Image-stack dataset for texture discrimination: one T-stack per
/// trial, whole trials on either side of the split.
pub fn texture_split(
    kinds: &[SurfaceKind],
    train_trials: usize,
    test_trials: usize,
    t: usize,
    pool: usize,
    seed: u64,
) -> Result<SplitData> {
    let config = SensorConfig {
        pixel_noise_std: 2.0,
        ..SensorConfig::default()
    };
    let mut train = (Vec::new(), Vec::new());
    let mut test = (Vec::new(), Vec::new());
    for (class, kind) in kinds.iter().enumerate() {
        let surface = SurfaceSpec::preset(*kind);
        for trial in 0..train_trials + test_trials {
            let stack = texture_stack(&config, &surface, t, pool, trial_seed(seed, class, trial))?;
            let side = if trial < train_trials { &mut train } else { &mut test };
            side.0.push(stack.data);
            side.1.push(class);
        }
    }
    Ok(split_from_rows(train, test))
}

/// Vector-stack dataset over {soft, hard, slippery, no-touch}: the same
/// press-then-shear script on each surface, idle for no-touch, features
/// are the stacked true displacement fields plus measurement noise.
pub fn surface_split(
    train_trials: usize,
    test_trials: usize,
    t: usize,
    seed: u64,
) -> Result<SplitData> {
    let config = SensorConfig::default();
    let kinds = [
        Some(SurfaceKind::Soft),
        Some(SurfaceKind::Hard),
        Some(SurfaceKind::Slippery),
        None, // no touch
    ];
    let mut train = (Vec::new(), Vec::new());
    let mut test = (Vec::new(), Vec::new());
    for (class, kind) in kinds.iter().enumerate() {
        for trial in 0..train_trials + test_trials {
            let tseed = trial_seed(seed, class, trial);
            let (surface, script) = match kind {
                Some(k) => {
                    let s = SurfaceSpec::preset(*k);
                    let script = press_shear_script(s.clone(), 0.6, (1.0, 0.0), 1.0, t as u32 + 2);
                    (s, script)
                }
                None => {
                    let s = SurfaceSpec::preset(SurfaceKind::Hard);
                    let script = StimulusScript::new(
                        s.clone(),
                        vec![ScriptStep {
                            frames: 14 + t as u32,
                            action: Action::Idle,
                        }],
                    );
                    (s, script)
                }
            };
            let _ = surface;
            let (truths, _) = run_script(&script, &config, tseed, false)?;
            let mut noise_rng = ChaCha8Rng::seed_from_u64(tseed ^ 0xfeed);
            let fields: Vec<Vec<f64>> = truths
                .iter()
                .map(|truth| {
                    truth
                        .displacement
                        .iter()
                        .flat_map(|&(dx, dy)| [dx, dy])
                        .map(|v| v + gaussian(&mut noise_rng) * 0.3)
                        .collect()
                })
                .collect();
            let stack = stack_vectors(&fields, t)?;
            let side = if trial < train_trials { &mut train } else { &mut test };
            side.0.push(stack);
            side.1.push(class);
        }
    }
    Ok(split_from_rows(train, test))
}

/// Class names for `surface_split`, index-aligned with its labels.
pub const SURFACE_SPLIT_CLASSES: [&str; 4] = ["soft", "hard", "slippery", "no_touch"];

/// Temporal-only discrimination: alternating vs held whole-field offset.
/// Single-frame marginals are identical by construction, so accuracy
/// above chance requires multi-frame context. Features are the per-frame
/// average displacement plus noise.
pub fn temporal_split(
    train_trials: usize,
    test_trials: usize,
    t: usize,
    amp: f64,
    noise: f64,
    seed: u64,
) -> Result<SplitData> {
    let config = SensorConfig::default();
    let patterns = [JitterPattern::Alternating, JitterPattern::Held];
    let mut train = (Vec::new(), Vec::new());
    let mut test = (Vec::new(), Vec::new());
    for (class, pattern) in patterns.iter().enumerate() {
        let surface = SurfaceSpec::temporal_probe(*pattern, amp);
        for trial in 0..train_trials + test_trials {
            let tseed = trial_seed(seed, class, trial);
            let script = press_hold_script(surface.clone(), 0.5, 4 + t as u32);
            let (truths, _) = run_script(&script, &config, tseed, false)?;
            let mut noise_rng = ChaCha8Rng::seed_from_u64(tseed ^ 0xfade);
            let fields: Vec<Vec<f64>> = truths
                .iter()
                .map(|truth| {
                    vec![
                        truth.avg_displacement.0 + gaussian(&mut noise_rng) * noise,
                        truth.avg_displacement.1 + gaussian(&mut noise_rng) * noise,
                    ]
                })
                .collect();
            let stack = stack_vectors(&fields, t)?;
            let side = if trial < train_trials { &mut train } else { &mut test };
            side.0.push(stack);
            side.1.push(class);
        }
    }
    Ok(split_from_rows(train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagery::{adaptive_threshold, extract_centroids, remove_large_blobs};

    #[test]
    fn rest_layout_has_exact_count_and_margins() {
        let config = SensorConfig::default();
        let layout = config.rest_layout().unwrap();
        assert_eq!(layout.len(), 133);
        let margin = 2.0 * config.marker_radius;
        for &(x, y) in &layout {
            assert!(x >= margin && x <= 127.0 - margin);
            assert!(y >= margin && y <= 127.0 - margin);
        }
        // Distinct points.
        for i in 0..layout.len() {
            for j in i + 1..layout.len() {
                assert!(
                    crate::tracking::euclidean_distance(layout[i], layout[j]) > 1.0,
                    "markers {} and {} overlap",
                    i,
                    j
                );
            }
        }
    }

    #[test]
    fn idle_forever_stays_at_rest() {
        let config = SensorConfig::default();
        let mut sim = Simulation::new(config, SurfaceSpec::preset(SurfaceKind::Hard), 1).unwrap();
        for _ in 0..20 {
            let truth = sim.step(&Action::Idle).unwrap();
            assert_eq!(truth.force, 0.0);
            assert!(!truth.contact);
            for (p, r) in truth.positions.iter().zip(sim.rest_layout()) {
                assert_eq!(p, r);
            }
        }
    }

    #[test]
    fn zero_depth_press_produces_nothing() {
        let config = SensorConfig::default();
        let mut sim = Simulation::new(config, SurfaceSpec::preset(SurfaceKind::Hard), 2).unwrap();
        for _ in 0..10 {
            let truth = sim.step(&Action::Press { depth: 0.0 }).unwrap();
            assert_eq!(truth.force, 0.0);
            assert_eq!(truth.avg_displacement, (0.0, 0.0));
        }
    }

    #[test]
    fn shear_before_press_is_a_script_error() {
        let config = SensorConfig::default();
        let mut sim = Simulation::new(config, SurfaceSpec::preset(SurfaceKind::Hard), 3).unwrap();
        assert!(matches!(
            sim.step(&Action::Shear {
                dir: (1.0, 0.0),
                speed: 1.0
            }),
            Err(Error::Script { .. })
        ));
    }

    #[test]
    fn slippery_transfers_a_fraction_of_shear() {
        let config = SensorConfig::default();
        let run = |surface: SurfaceSpec| {
            let script = press_shear_script(surface, 0.6, (1.0, 0.0), 0.5, 8);
            let (truths, _) = run_script(&script, &config, 9, false).unwrap();
            truths.last().unwrap().avg_displacement.0
        };
        let hard = run(SurfaceSpec::preset(SurfaceKind::Hard));
        let slippery = run(SurfaceSpec::preset(SurfaceKind::Slippery));
        let ratio = slippery / hard;
        // Radial press part cancels in the average; the residual is shear.
        assert!(ratio < 0.3, "slip ratio {} too high", ratio);
        assert!(ratio > 0.0);
    }

    #[test]
    fn force_is_monotone_in_depth_and_lower_on_soft() {
        let config = SensorConfig::default();
        let force_at = |kind: SurfaceKind, depth: f64| {
            let script = press_hold_script(SurfaceSpec::preset(kind), depth, 30);
            let (truths, _) = run_script(&script, &config, 4, false).unwrap();
            truths.last().unwrap().force
        };
        let mut prev = -1.0;
        for depth in [0.0, 0.2, 0.4, 0.8, 1.0] {
            let f = force_at(SurfaceKind::Hard, depth);
            assert!(f >= prev);
            prev = f;
        }
        assert!(force_at(SurfaceKind::Soft, 0.8) < force_at(SurfaceKind::Hard, 0.8));
    }

    #[test]
    fn texture_energy_ordering() {
        let config = SensorConfig::default();
        let energy = |kind: SurfaceKind| {
            let script = press_shear_script(SurfaceSpec::preset(kind), 0.5, (1.0, 0.0), 0.5, 40);
            let (truths, _) = run_script(&script, &config, 5, false).unwrap();
            let steady = &truths[truths.len() - 30..];
            let mut total = 0.0;
            let mut count = 0usize;
            for pair in steady.windows(2) {
                for (a, b) in pair[0].positions.iter().zip(pair[1].positions.iter()) {
                    total += crate::tracking::euclidean_distance(*a, *b);
                    count += 1;
                }
            }
            total / count as f64
        };
        let lego = energy(SurfaceKind::Lego);
        let concrete = energy(SurfaceKind::Concrete);
        let smooth = energy(SurfaceKind::SmoothWood);
        assert!(lego > concrete, "lego {} <= concrete {}", lego, concrete);
        assert!(concrete > smooth, "concrete {} <= smooth {}", concrete, smooth);
    }

    #[test]
    fn rendered_rest_frame_recovers_all_markers() {
        let config = SensorConfig::default();
        let mut sim =
            Simulation::new(config.clone(), SurfaceSpec::preset(SurfaceKind::Hard), 6).unwrap();
        let truth = sim.step(&Action::Idle).unwrap();
        let frame = sim.render(&truth);
        let binary = adaptive_threshold(&frame, 15, 10.0).unwrap();
        let markers = extract_centroids(&binary, 5).unwrap();
        assert_eq!(markers.count(), 133);
        // Match each centroid to its nearest ground-truth marker.
        for &(mx, my) in &markers.points {
            let best = truth
                .positions
                .iter()
                .map(|&p| crate::tracking::euclidean_distance(p, (mx, my)))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 0.5, "centroid error {} px", best);
        }
    }

    #[test]
    fn glare_appears_then_is_removed() {
        let config = SensorConfig::default().with_glare();
        let mut sim =
            Simulation::new(config.clone(), SurfaceSpec::preset(SurfaceKind::Hard), 7).unwrap();
        let truth = sim.step(&Action::Idle).unwrap();
        let frame = sim.render(&truth);
        let binary = adaptive_threshold(&frame, 15, 10.0).unwrap();
        let has_large = crate::imagery::find_blobs(&binary)
            .iter()
            .any(|b| b.area > 100);
        assert!(has_large, "glare blob missing before removal");
        let cleaned = remove_large_blobs(&binary, 100).unwrap();
        assert!(crate::imagery::find_blobs(&cleaned)
            .iter()
            .all(|b| b.area <= 100));
    }

    #[test]
    fn identical_renders_keep_contact_grid_at_zero() {
        let config = SensorConfig::default();
        let mut sim =
            Simulation::new(config, SurfaceSpec::preset(SurfaceKind::Hard), 8).unwrap();
        let t1 = sim.step(&Action::Idle).unwrap();
        let t2 = sim.step(&Action::Idle).unwrap();
        let f1 = sim.render(&t1);
        let f2 = sim.render(&t2);
        let mut grid = crate::contact::ForceGrid::new(f1, 5, 0.5).unwrap();
        grid.update(f2).unwrap();
        assert_eq!(grid.total_activation(), 0.0);
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let config = SensorConfig {
            pixel_noise_std: 2.0,
            jitter_noise_std: 0.1,
            ..SensorConfig::default()
        };
        let script = press_shear_script(
            SurfaceSpec::preset(SurfaceKind::Concrete),
            0.5,
            (1.0, 0.0),
            1.0,
            10,
        );
        let (_, frames_a) = run_script(&script, &config, 42, true).unwrap();
        let (_, frames_b) = run_script(&script, &config, 42, true).unwrap();
        assert_eq!(frames_a.len(), frames_b.len());
        for (a, b) in frames_a.iter().zip(frames_b.iter()) {
            assert_eq!(a.data, b.data);
        }
    }

    #[test]
    fn script_parser_round_trip() {
        let text = "surface=lego\nidle 5\npress 0.4 30\nshear 1,0 2 60\nrelease 20\n";
        let script = StimulusScript::parse(text).unwrap();
        assert_eq!(script.surface.kind, SurfaceKind::Lego);
        assert_eq!(script.steps.len(), 4);
        assert_eq!(script.total_frames(), 115);
        assert!(StimulusScript::parse("press 0.4 10\n").is_err()); // no surface
        assert!(StimulusScript::parse("surface=lego\npress 2.0 10\n").is_err());
        assert!(StimulusScript::parse("surface=lego\nwiggle 3\n").is_err());
    }
}
