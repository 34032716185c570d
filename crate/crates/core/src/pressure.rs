//! Pressure estimation from marker displacement fields.
//!
//! The magnitude-sum baseline totals the displacement magnitudes; it
//! locates touch but separates depths poorly. The ridge regressor takes
//! all 266 displacement components and predicts force directly.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tracking::{ridge_solve, VectorField, MARKER_COUNT};

/// Surface class attached to a pressure sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureSurface {
    Hard,
    Soft,
}

impl PressureSurface {
    pub fn as_str(&self) -> &'static str {
        match self {
            PressureSurface::Hard => "hard",
            PressureSurface::Soft => "soft",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hard" => Ok(PressureSurface::Hard),
            "soft" => Ok(PressureSurface::Soft),
            other => Err(Error::Data(format!("unknown pressure surface '{}'", other))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PressureSample {
    pub vectors: VectorField,
    pub pressure: f64,
    pub surface: PressureSurface,
}

/// Linear model over the flattened 266-component displacement field.
#[derive(Debug, Clone)]
pub struct RidgePressureModel {
    pub weights: DVector<f64>,
    pub bias: f64,
    pub alpha: f64,
}

/// Sum of displacement magnitudes; zero for an empty field.
pub fn magnitude_sum(field: &VectorField) -> f64 {
    field
        .displacements()
        .map(|(dx, dy)| (dx * dx + dy * dy).sqrt())
        .sum()
}

pub fn train_pressure_model(samples: &[PressureSample], alpha: f64) -> Result<RidgePressureModel> {
    if samples.len() < 2 {
        return Err(Error::Data("need at least 2 pressure samples".into()));
    }
    let first = samples[0].pressure;
    if samples.iter().all(|s| s.pressure == first) {
        return Err(Error::Data(
            "pressure samples must span at least 2 distinct pressures".into(),
        ));
    }
    let dim = samples[0].vectors.count() * 2;
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.vectors.flatten()).collect();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Data("inconsistent vector counts across samples".into()));
    }
    let x = DMatrix::from_fn(samples.len(), dim, |r, c| rows[r][c]);
    let y = DMatrix::from_fn(samples.len(), 1, |r, _| samples[r].pressure);
    let (w, b) = ridge_solve(&x, &y, alpha)?;
    Ok(RidgePressureModel {
        weights: w.column(0).into_owned(),
        bias: b[0],
        alpha,
    })
}

/// Scalar prediction, clamped at zero (negative force is unphysical).
pub fn predict_pressure(model: &RidgePressureModel, field: &VectorField) -> Result<f64> {
    let features = field.flatten();
    if features.len() != model.weights.len() {
        return Err(Error::Parameter(format!(
            "field has {} vectors, model expects {}",
            field.count(),
            model.weights.len() / 2
        )));
    }
    let raw: f64 = features
        .iter()
        .zip(model.weights.iter())
        .map(|(f, w)| f * w)
        .sum::<f64>()
        + model.bias;
    Ok(raw.max(0.0))
}

/// Unclamped affine prediction, for linearity checks.
pub fn predict_pressure_raw(model: &RidgePressureModel, field: &VectorField) -> Result<f64> {
    let features = field.flatten();
    if features.len() != model.weights.len() {
        return Err(Error::Parameter("vector count mismatch".into()));
    }
    Ok(features
        .iter()
        .zip(model.weights.iter())
        .map(|(f, w)| f * w)
        .sum::<f64>()
        + model.bias)
}

/// Text model file: "alpha bias w0 w1 ... w265" on one line.
pub fn save_pressure_model(model: &RidgePressureModel, path: &Path) -> Result<()> {
    let mut out = format!("{} {}", model.alpha, model.bias);
    for w in model.weights.iter() {
        out.push_str(&format!(" {}", w));
    }
    out.push('\n');
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_pressure_model(path: &Path) -> Result<RidgePressureModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Data(format!("bad number '{}' in pressure model", v)))
        })
        .collect::<Result<_>>()?;
    if values.len() < 3 {
        return Err(Error::Data("pressure model file too short".into()));
    }
    Ok(RidgePressureModel {
        alpha: values[0],
        bias: values[1],
        weights: DVector::from_vec(values[2..].to_vec()),
    })
}

/// Dataset lines: "pressure surface v0x v0y ... v132x v132y".
pub fn save_pressure_dataset(samples: &[PressureSample], path: &Path) -> Result<()> {
    let mut out = String::new();
    for s in samples {
        out.push_str(&format!("{} {}", s.pressure, s.surface.as_str()));
        for v in s.vectors.flatten() {
            out.push_str(&format!(" {}", v));
        }
        out.push('\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_pressure_dataset(path: &Path) -> Result<Vec<PressureSample>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let bad = |what: &str| Error::Data(format!("{} on line {}", what, lineno + 1));
        let pressure: f64 = parts
            .next()
            .ok_or_else(|| bad("missing pressure"))?
            .parse()
            .map_err(|_| bad("bad pressure"))?;
        let surface = PressureSurface::parse(parts.next().ok_or_else(|| bad("missing surface"))?)?;
        let coords: Vec<f64> = parts
            .map(|p| p.parse().map_err(|_| bad("bad component")))
            .collect::<Result<_>>()?;
        if coords.len() != 2 * MARKER_COUNT {
            return Err(bad("wrong component count"));
        }
        let vectors = VectorField {
            vectors: coords
                .chunks(2)
                .map(|c| ((0.0, 0.0), (c[0], c[1])))
                .collect(),
        };
        samples.push(PressureSample {
            vectors,
            pressure,
            surface,
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(disp: &[(f64, f64)]) -> VectorField {
        VectorField {
            vectors: disp.iter().map(|&d| ((0.0, 0.0), d)).collect(),
        }
    }

    #[test]
    fn magnitude_sum_basics() {
        assert_eq!(magnitude_sum(&field(&[(3.0, 4.0)])), 5.0);
        assert_eq!(magnitude_sum(&field(&[])), 0.0);
    }

    #[test]
    fn magnitude_sum_is_homogeneous_and_permutation_invariant() {
        let a = field(&[(1.0, 2.0), (-3.0, 0.5), (0.0, -4.0)]);
        let scaled = field(&[(2.5, 5.0), (-7.5, 1.25), (0.0, -10.0)]);
        assert!((magnitude_sum(&scaled) - 2.5 * magnitude_sum(&a)).abs() < 1e-12);
        let permuted = field(&[(0.0, -4.0), (1.0, 2.0), (-3.0, 0.5)]);
        assert!((magnitude_sum(&permuted) - magnitude_sum(&a)).abs() < 1e-12);
    }

    #[test]
    fn two_point_line_is_fit_exactly() {
        let s0 = PressureSample {
            vectors: field(&[(0.0, 0.0), (0.0, 0.0)]),
            pressure: 0.0,
            surface: PressureSurface::Hard,
        };
        let s1 = PressureSample {
            vectors: field(&[(2.0, 0.0), (0.0, 2.0)]),
            pressure: 10.0,
            surface: PressureSurface::Hard,
        };
        let model = train_pressure_model(&[s0.clone(), s1.clone()], 1e-9).unwrap();
        assert!((predict_pressure(&model, &s0.vectors).unwrap() - 0.0).abs() < 1e-5);
        assert!((predict_pressure(&model, &s1.vectors).unwrap() - 10.0).abs() < 1e-5);
        // Affine in the input before clamping.
        let mid = field(&[(1.0, 0.0), (0.0, 1.0)]);
        assert!((predict_pressure_raw(&model, &mid).unwrap() - 5.0).abs() < 1e-5);
    }

    #[test]
    fn degenerate_training_set_errors() {
        let s = PressureSample {
            vectors: field(&[(1.0, 1.0)]),
            pressure: 5.0,
            surface: PressureSurface::Soft,
        };
        assert!(train_pressure_model(&[s.clone(), s], 1.0).is_err());
    }

    #[test]
    fn zero_field_with_zero_bias_predicts_zero() {
        let model = RidgePressureModel {
            weights: DVector::zeros(4),
            bias: 0.0,
            alpha: 1.0,
        };
        assert_eq!(
            predict_pressure(&model, &field(&[(0.0, 0.0), (0.0, 0.0)])).unwrap(),
            0.0
        );
    }

    #[test]
    fn prediction_clamps_below_zero() {
        let model = RidgePressureModel {
            weights: DVector::from_vec(vec![1.0, 0.0]),
            bias: -10.0,
            alpha: 1.0,
        };
        assert_eq!(predict_pressure(&model, &field(&[(1.0, 0.0)])).unwrap(), 0.0);
    }

    #[test]
    fn wrong_vector_count_is_parameter_error() {
        let model = RidgePressureModel {
            weights: DVector::zeros(6),
            bias: 0.0,
            alpha: 1.0,
        };
        assert!(matches!(
            predict_pressure(&model, &field(&[(1.0, 0.0)])),
            Err(Error::Parameter(_))
        ));
    }
}
