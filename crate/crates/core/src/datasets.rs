//! Persistence and labeling: frame containers, manifests, validation,
//! and leakage-free train/test splitting.
//!
//! Consecutive frames are near-duplicates, so splits are stratified at
//! trial granularity: a trial's frames never span both sides.

use std::io::Write;
use std::path::Path;

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imagery::GrayFrame;

/// Registered label vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Soft,
    Hard,
    Slippery,
    NoTouch,
    Lego,
    Concrete,
    SmoothWood,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Soft => "soft",
            Label::Hard => "hard",
            Label::Slippery => "slippery",
            Label::NoTouch => "no_touch",
            Label::Lego => "lego",
            Label::Concrete => "concrete",
            Label::SmoothWood => "smooth_wood",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "soft" => Label::Soft,
            "hard" => Label::Hard,
            "slippery" => Label::Slippery,
            "no_touch" => Label::NoTouch,
            "lego" => Label::Lego,
            "concrete" => Label::Concrete,
            "smooth_wood" => Label::SmoothWood,
            other => return Err(Error::Data(format!("unregistered label '{}'", other))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub frame_index: u64,
    pub label: Label,
    pub pressure: Option<f64>,
    pub contact: bool,
    pub trial_id: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn contact_flags(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.contact).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::from("frame_index,label,pressure,contact,trial_id\n");
        for r in &self.rows {
            let pressure = r.pressure.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.frame_index,
                r.label.as_str(),
                pressure,
                u8::from(r.contact),
                r.trial_id
            ));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        match lines.next() {
            Some("frame_index,label,pressure,contact,trial_id") => {}
            _ => {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    reason: "missing manifest header".into(),
                    offset: 0,
                })
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let bad = |what: &str| Error::Data(format!("manifest row {}: {}", lineno + 2, what));
            if fields.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            rows.push(ManifestRow {
                frame_index: fields[0].parse().map_err(|_| bad("bad frame_index"))?,
                label: Label::parse(fields[1])
                    .map_err(|_| bad(&format!("unregistered label '{}'", fields[1])))?,
                pressure: if fields[2].is_empty() {
                    None
                } else {
                    Some(fields[2].parse().map_err(|_| bad("bad pressure"))?)
                },
                contact: match fields[3] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("contact must be 0 or 1")),
                },
                trial_id: fields[4].parse().map_err(|_| bad("bad trial_id"))?,
            });
        }
        Ok(Manifest { rows })
    }
}

const CONTAINER_MAGIC: &[u8; 4] = b"TACF";
const CONTAINER_VERSION: u8 = 1;

/// Frame container: "TACF", version u8, width u16, height u16,
/// frame_count u32, then raw row-major frame bytes. Little-endian.
pub fn save_container(frames: &[GrayFrame], path: &Path) -> Result<()> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Data("cannot save an empty container".into()))?;
    let (w, h) = (first.width, first.height);
    if w > u16::MAX as u32 || h > u16::MAX as u32 {
        return Err(Error::Parameter("container frames are limited to u16 dimensions".into()));
    }
    let mut out = Vec::with_capacity(13 + frames.len() * first.data.len());
    out.extend_from_slice(CONTAINER_MAGIC);
    out.push(CONTAINER_VERSION);
    out.extend_from_slice(&(w as u16).to_le_bytes());
    out.extend_from_slice(&(h as u16).to_le_bytes());
    out.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    for f in frames {
        if f.width != w || f.height != h {
            return Err(Error::Data("container frames must share dimensions".into()));
        }
        out.extend_from_slice(&f.data);
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}

pub fn load_container(path: &Path) -> Result<Vec<GrayFrame>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let fmt = |reason: &str, offset: u64| Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
        offset,
    };
    if raw.len() < 13 {
        return Err(fmt("file shorter than header", raw.len() as u64));
    }
    if &raw[..4] != CONTAINER_MAGIC {
        return Err(fmt("missing TACF magic", 0));
    }
    if raw[4] != CONTAINER_VERSION {
        return Err(fmt("unsupported container version", 4));
    }
    let width = u16::from_le_bytes([raw[5], raw[6]]) as u32;
    let height = u16::from_le_bytes([raw[7], raw[8]]) as u32;
    let count = u32::from_le_bytes([raw[9], raw[10], raw[11], raw[12]]) as usize;
    let frame_len = (width * height) as usize;
    let expected = 13 + count * frame_len;
    if raw.len() != expected {
        return Err(fmt(
            "frame data truncated or trailing bytes",
            raw.len().min(expected) as u64,
        ));
    }
    let mut frames = Vec::with_capacity(count);
    for i in 0..count {
        let start = 13 + i * frame_len;
        frames.push(GrayFrame {
            width,
            height,
            data: raw[start..start + frame_len].to_vec(),
            timestamp: i as u64,
        });
    }
    Ok(frames)
}

/// Non-fatal findings from checking a manifest against its container.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Total check: never panics on malformed input, reports every finding.
pub fn validate(manifest: &Manifest, frames: &[GrayFrame]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if manifest.rows.len() != frames.len() {
        report.findings.push(format!(
            "row count {} does not match frame count {}",
            manifest.rows.len(),
            frames.len()
        ));
    }
    let mut per_trial: std::collections::BTreeMap<u64, u64> = Default::default();
    for (i, row) in manifest.rows.iter().enumerate() {
        if let Some(&prev) = per_trial.get(&row.trial_id) {
            if row.frame_index <= prev {
                report.findings.push(format!(
                    "row {}: frame_index {} not increasing within trial {}",
                    i, row.frame_index, row.trial_id
                ));
            }
        }
        per_trial.insert(row.trial_id, row.frame_index);
        if let Some(p) = row.pressure {
            if !(p.is_finite() && p >= 0.0) {
                report
                    .findings
                    .push(format!("row {}: pressure {} out of range", i, p));
            }
        }
    }
    report
}

/// One admissible temporal-stack endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackCandidate {
    /// Row index of the stack's newest frame.
    pub row: usize,
    pub label: Label,
    pub trial_id: u64,
}

/// Trial-stratified split over gated stack candidates.
#[derive(Debug, Clone)]
pub struct Split {
    pub candidates: Vec<StackCandidate>,
    /// Indices into `candidates`.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl Split {
    pub fn train_candidates(&self) -> impl Iterator<Item = &StackCandidate> {
        self.train.iter().map(|&i| &self.candidates[i])
    }

    pub fn test_candidates(&self) -> impl Iterator<Item = &StackCandidate> {
        self.test.iter().map(|&i| &self.candidates[i])
    }
}

/// Selects contact rows with `t - 1` same-trial predecessors as stack
/// candidates, then assigns whole trials to train or test, stratified by
/// label. `test_fraction` of each label's trials (at least one when the
/// label has two or more) goes to test.
pub fn gate_and_split(
    manifest: &Manifest,
    contact: &[bool],
    t: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<Split> {
    if contact.len() != manifest.rows.len() {
        return Err(Error::Data(format!(
            "{} contact flags for {} rows",
            contact.len(),
            manifest.rows.len()
        )));
    }
    if t < 1 {
        return Err(Error::Parameter("T must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Parameter("test_fraction must be in [0, 1)".into()));
    }
    let mut candidates = Vec::new();
    for (i, row) in manifest.rows.iter().enumerate() {
        if !contact[i] {
            continue;
        }
        let enough_history = i + 1 >= t
            && manifest.rows[i + 1 - t..=i]
                .iter()
                .all(|r| r.trial_id == row.trial_id);
        if enough_history {
            candidates.push(StackCandidate {
                row: i,
                label: row.label,
                trial_id: row.trial_id,
            });
        }
    }
    if candidates.is_empty() {
        return Err(Error::Data(
            "no stack candidates: no gated frames with enough history".into(),
        ));
    }
    // label -> sorted distinct trials
    let mut strata: std::collections::BTreeMap<Label, Vec<u64>> = Default::default();
    for c in &candidates {
        let trials = strata.entry(c.label).or_default();
        if !trials.contains(&c.trial_id) {
            trials.push(c.trial_id);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_trials: std::collections::BTreeSet<u64> = Default::default();
    for (_, mut trials) in strata {
        trials.sort_unstable();
        trials.shuffle(&mut rng);
        let mut take = (trials.len() as f64 * test_fraction).ceil() as usize;
        if trials.len() < 2 {
            take = 0;
        }
        for trial in trials.into_iter().take(take) {
            test_trials.insert(trial);
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if test_trials.contains(&c.trial_id) {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    Ok(Split {
        candidates,
        train,
        test,
        seed,
    })
}
