//! Marker correspondence and displacement estimation.
//!
//! Two trackers coexist. The vector model matches detected centroids
//! between an origin frame and the current frame by shortest Euclidean
//! distance; its marker count varies with detection quality. The ridge
//! marker model regresses a fixed 133-point layout straight from the
//! binary image, which keeps the count constant under glare and noise.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::imagery::{BinaryFrame, MarkerSet};

pub const MARKER_COUNT: usize = 133;

/// Origin -> current displacement vectors for matched markers.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub vectors: Vec<((f64, f64), (f64, f64))>,
}

impl VectorField {
    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn displacements(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.vectors
            .iter()
            .map(|(o, t)| (t.0 - o.0, t.1 - o.1))
    }

    /// Flattened displacement features [dx0, dy0, dx1, dy1, ...].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vectors.len() * 2);
        for (dx, dy) in self.displacements() {
            out.push(dx);
            out.push(dy);
        }
        out
    }
}

/// Partial injection between origin and current marker indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_origins: Vec<usize>,
    pub unmatched_currents: Vec<usize>,
}

pub fn euclidean_distance(o: (f64, f64), t: (f64, f64)) -> f64 {
    ((o.0 - t.0).powi(2) + (o.1 - t.1).powi(2)).sqrt()
}

/// Greedy global matching: repeatedly take the unpaired (origin, current)
/// couple at smallest distance, stopping once the smallest remaining
/// distance exceeds `max_dist`. Ties break toward the lower
/// (origin_index, current_index).
pub fn match_points(
    origins: &MarkerSet,
    currents: &MarkerSet,
    max_dist: f64,
) -> Result<Assignment> {
    if max_dist <= 0.0 {
        return Err(Error::Parameter("max_dist must be > 0".into()));
    }
    let mut candidates = Vec::with_capacity(origins.count() * currents.count());
    for (oi, &o) in origins.points.iter().enumerate() {
        for (ci, &c) in currents.points.iter().enumerate() {
            let d = euclidean_distance(o, c);
            if d <= max_dist {
                candidates.push((d, oi, ci));
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let mut origin_used = vec![false; origins.count()];
    let mut current_used = vec![false; currents.count()];
    let mut pairs = Vec::new();
    for (_, oi, ci) in candidates {
        if !origin_used[oi] && !current_used[ci] {
            origin_used[oi] = true;
            current_used[ci] = true;
            pairs.push((oi, ci));
        }
    }
    Ok(Assignment {
        pairs,
        unmatched_origins: (0..origins.count()).filter(|&i| !origin_used[i]).collect(),
        unmatched_currents: (0..currents.count()).filter(|&i| !current_used[i]).collect(),
    })
}

/// One displacement vector per matched pair.
pub fn vector_field(
    origins: &MarkerSet,
    currents: &MarkerSet,
    assignment: &Assignment,
) -> Result<VectorField> {
    let mut vectors = Vec::with_capacity(assignment.pairs.len());
    for &(oi, ci) in &assignment.pairs {
        let o = *origins
            .points
            .get(oi)
            .ok_or_else(|| Error::Internal(format!("origin index {} out of bounds", oi)))?;
        let c = *currents
            .points
            .get(ci)
            .ok_or_else(|| Error::Internal(format!("current index {} out of bounds", ci)))?;
        vectors.push((o, c));
    }
    Ok(VectorField { vectors })
}

/// Componentwise mean displacement: the sensor's overall heading.
pub fn average_vector(field: &VectorField) -> Result<(f64, f64)> {
    if field.vectors.is_empty() {
        return Err(Error::Data("average of an empty vector field".into()));
    }
    let n = field.vectors.len() as f64;
    let (sx, sy) = field
        .displacements()
        .fold((0.0, 0.0), |(ax, ay), (dx, dy)| (ax + dx, ay + dy));
    Ok((sx / n, sy / n))
}

/// Augmentation applied to labelled frames before the ridge solve.
#[derive(Debug, Clone)]
pub struct AugmentSpec {
    /// Integer pixel shifts; labels shift identically.
    pub translations: Vec<(i32, i32)>,
    /// Central zoom factors; labels rescale about the frame center.
    pub zooms: Vec<f64>,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        AugmentSpec {
            translations: vec![
                (0, 0),
                (-10, 0),
                (10, 0),
                (0, -10),
                (0, 10),
                (-5, -5),
                (5, 5),
            ],
            zooms: vec![0.9, 1.1],
        }
    }
}

impl AugmentSpec {
    pub fn none() -> Self {
        AugmentSpec {
            translations: vec![(0, 0)],
            zooms: Vec::new(),
        }
    }
}

/// Fixed-count marker localizer: linear map from the downsampled binary
/// image to all 133 (x, y) positions, fit in closed form.
#[derive(Debug, Clone)]
pub struct RidgeMarkerModel {
    /// feature_len x (2 * marker_count), column-interleaved [x0 y0 x1 y1 ...].
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub alpha: f64,
    /// Downsampled side length; feature_len = side * side.
    pub side: u32,
    pub marker_count: usize,
}

impl RidgeMarkerModel {
    pub fn feature_len(&self) -> usize {
        (self.side * self.side) as usize
    }
}

pub fn translate_frame(frame: &BinaryFrame, dx: i32, dy: i32) -> BinaryFrame {
    let (w, h) = (frame.width as i32, frame.height as i32);
    let mut bits = vec![0u8; (w * h) as usize];
    for y in 0..h {
        let sy = y - dy;
        if sy < 0 || sy >= h {
            continue;
        }
        for x in 0..w {
            let sx = x - dx;
            if sx >= 0 && sx < w {
                bits[(y * w + x) as usize] = frame.bits[(sy * w + sx) as usize];
            }
        }
    }
    BinaryFrame {
        width: frame.width,
        height: frame.height,
        bits,
    }
}

/// Nearest-neighbor zoom about the frame center.
pub fn zoom_frame(frame: &BinaryFrame, factor: f64) -> BinaryFrame {
    let (w, h) = (frame.width as i32, frame.height as i32);
    let (cx, cy) = ((w - 1) as f64 / 2.0, (h - 1) as f64 / 2.0);
    let mut bits = vec![0u8; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let sx = (cx + (x as f64 - cx) / factor).round() as i32;
            let sy = (cy + (y as f64 - cy) / factor).round() as i32;
            if sx >= 0 && sx < w && sy >= 0 && sy < h {
                bits[(y * w + x) as usize] = frame.bits[(sy * w + sx) as usize];
            }
        }
    }
    BinaryFrame {
        width: frame.width,
        height: frame.height,
        bits,
    }
}

/// Mean-pools a binary frame into a side x side feature vector in [0, 1].
pub fn downsample_features(frame: &BinaryFrame, side: u32) -> Vec<f64> {
    let s = side as usize;
    let mut sums = vec![0.0f64; s * s];
    let mut counts = vec![0u32; s * s];
    let (w, h) = (frame.width as usize, frame.height as usize);
    for y in 0..h {
        let by = y * s / h;
        for x in 0..w {
            let bx = x * s / w;
            let bin = by * s + bx;
            sums[bin] += frame.bits[y * w + x] as f64;
            counts[bin] += 1;
        }
    }
    sums.iter()
        .zip(counts.iter())
        .map(|(&v, &c)| if c > 0 { v / c as f64 } else { 0.0 })
        .collect()
}

/// Exact ridge solve with an unpenalized intercept: columns of X and Y
/// are centered, then `(X'X + aI) W = X'Y` (or its dual when samples are
/// fewer than features, which yields the identical solution).
pub fn ridge_solve(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    alpha: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if alpha <= 0.0 {
        return Err(Error::Parameter("alpha must be > 0".into()));
    }
    let n = x.nrows();
    let p = x.ncols();
    if n == 0 || y.nrows() != n {
        return Err(Error::Data("ridge solve needs matching non-empty X and Y".into()));
    }
    let x_mean = x.row_mean();
    let y_mean = y.row_mean();
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        row -= &x_mean;
    }
    let mut yc = y.clone();
    for mut row in yc.row_iter_mut() {
        row -= &y_mean;
    }
    let weights = if n >= p {
        let mut gram = xc.transpose() * &xc;
        for i in 0..p {
            gram[(i, i)] += alpha;
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Data("ridge normal equations are not positive definite".into()))?;
        chol.solve(&(xc.transpose() * &yc))
    } else {
        let mut kernel = &xc * xc.transpose();
        for i in 0..n {
            kernel[(i, i)] += alpha;
        }
        let chol = kernel
            .cholesky()
            .ok_or_else(|| Error::Data("ridge kernel matrix is not positive definite".into()))?;
        xc.transpose() * chol.solve(&yc)
    };
    let bias = (y_mean - x_mean * &weights).transpose();
    Ok((weights, bias))
}

/// Fits the fixed-count marker localizer on labelled binary frames.
pub fn train_marker_model(
    samples: &[(BinaryFrame, Vec<(f64, f64)>)],
    alpha: f64,
    augment: &AugmentSpec,
    side: u32,
) -> Result<RidgeMarkerModel> {
    if samples.is_empty() {
        return Err(Error::Data("no training samples".into()));
    }
    for (_, labels) in samples {
        if labels.len() != MARKER_COUNT {
            return Err(Error::Data(format!(
                "expected {} labelled points, got {}",
                MARKER_COUNT,
                labels.len()
            )));
        }
    }
    let feature_len = (side * side) as usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut targets: Vec<Vec<f64>> = Vec::new();
    for (frame, labels) in samples {
        let (cx, cy) = (
            (frame.width - 1) as f64 / 2.0,
            (frame.height - 1) as f64 / 2.0,
        );
        for &(dx, dy) in &augment.translations {
            let shifted = translate_frame(frame, dx, dy);
            rows.push(downsample_features(&shifted, side));
            targets.push(interleave(labels.iter().map(|&(x, y)| {
                (x + dx as f64, y + dy as f64)
            })));
        }
        for &z in &augment.zooms {
            let zoomed = zoom_frame(frame, z);
            rows.push(downsample_features(&zoomed, side));
            targets.push(interleave(labels.iter().map(|&(x, y)| {
                (cx + (x - cx) * z, cy + (y - cy) * z)
            })));
        }
    }
    let n = rows.len();
    let x = DMatrix::from_fn(n, feature_len, |r, c| rows[r][c]);
    let y = DMatrix::from_fn(n, 2 * MARKER_COUNT, |r, c| targets[r][c]);
    let (weights, bias) = ridge_solve(&x, &y, alpha)?;
    Ok(RidgeMarkerModel {
        weights,
        bias,
        alpha,
        side,
        marker_count: MARKER_COUNT,
    })
}

fn interleave(points: impl Iterator<Item = (f64, f64)>) -> Vec<f64> {
    let mut out = Vec::new();
    for (x, y) in points {
        out.push(x);
        out.push(y);
    }
    out
}

/// Always returns exactly `marker_count` points, whatever the frame shows.
pub fn predict_markers(model: &RidgeMarkerModel, frame: &BinaryFrame) -> MarkerSet {
    let features = DVector::from_vec(downsample_features(frame, model.side));
    let out = model.weights.transpose() * features + &model.bias;
    let (wmax, hmax) = ((frame.width - 1) as f64, (frame.height - 1) as f64);
    let points = (0..model.marker_count)
        .map(|i| {
            (
                out[2 * i].clamp(0.0, wmax),
                out[2 * i + 1].clamp(0.0, hmax),
            )
        })
        .collect();
    MarkerSet { points }
}

/// Displacement field from a model-predicted layout against a reference
/// layout, index-aligned (the regression model keeps marker identity).
pub fn model_vector_field(reference: &MarkerSet, predicted: &MarkerSet) -> Result<VectorField> {
    if reference.count() != predicted.count() {
        return Err(Error::Data(format!(
            "layout sizes differ: {} vs {}",
            reference.count(),
            predicted.count()
        )));
    }
    Ok(VectorField {
        vectors: reference
            .points
            .iter()
            .zip(predicted.points.iter())
            .map(|(&o, &t)| (o, t))
            .collect(),
    })
}

const MODEL_MAGIC: &[u8; 4] = b"TACR";

pub fn save_marker_model(model: &RidgeMarkerModel, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&model.alpha.to_le_bytes());
    out.extend_from_slice(&(model.feature_len() as u32).to_le_bytes());
    out.extend_from_slice(&(model.marker_count as u32).to_le_bytes());
    out.extend_from_slice(&model.side.to_le_bytes());
    for r in 0..model.weights.nrows() {
        for c in 0..model.weights.ncols() {
            out.extend_from_slice(&model.weights[(r, c)].to_le_bytes());
        }
    }
    for i in 0..model.bias.len() {
        out.extend_from_slice(&model.bias[i].to_le_bytes());
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

pub fn load_marker_model(path: &Path) -> Result<RidgeMarkerModel> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let fmt = |reason: &str, offset: usize| Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
        offset: offset as u64,
    };
    if raw.len() < 24 || &raw[..4] != MODEL_MAGIC {
        return Err(fmt("missing TACR magic", 0));
    }
    let f64_at = |off: usize| f64::from_le_bytes(raw[off..off + 8].try_into().unwrap());
    let u32_at = |off: usize| u32::from_le_bytes(raw[off..off + 4].try_into().unwrap());
    let alpha = f64_at(4);
    let feature_len = u32_at(12) as usize;
    let marker_count = u32_at(16) as usize;
    let side = u32_at(20);
    if (side * side) as usize != feature_len {
        return Err(fmt("feature_len does not match side", 12));
    }
    let outputs = 2 * marker_count;
    let need = 24 + 8 * (feature_len * outputs + outputs);
    if raw.len() != need {
        return Err(fmt("unexpected file length", raw.len().min(need)));
    }
    let mut off = 24;
    let mut weights = DMatrix::zeros(feature_len, outputs);
    for r in 0..feature_len {
        for c in 0..outputs {
            weights[(r, c)] = f64_at(off);
            off += 8;
        }
    }
    let mut bias = DVector::zeros(outputs);
    for i in 0..outputs {
        bias[i] = f64_at(off);
        off += 8;
    }
    Ok(RidgeMarkerModel {
        weights,
        bias,
        alpha,
        side,
        marker_count,
    })
}

/// Label file: one line per frame, "frame_index x0 y0 ... x132 y132".
pub fn save_labels(labels: &[(u64, Vec<(f64, f64)>)], path: &Path) -> Result<()> {
    let mut out = String::new();
    for (idx, points) in labels {
        out.push_str(&idx.to_string());
        for &(x, y) in points {
            out.push_str(&format!(" {} {}", x, y));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_labels(path: &Path) -> Result<Vec<(u64, Vec<(f64, f64)>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let idx: u64 = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|_| Error::Data(format!("bad frame index on line {}", lineno + 1)))?;
        let coords: Vec<f64> = parts
            .map(|p| {
                p.parse()
                    .map_err(|_| Error::Data(format!("bad coordinate on line {}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if coords.len() % 2 != 0 {
            return Err(Error::Data(format!(
                "odd coordinate count on line {}",
                lineno + 1
            )));
        }
        let points = coords.chunks(2).map(|c| (c[0], c[1])).collect();
        rows.push((idx, points));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: &[(f64, f64)]) -> MarkerSet {
        MarkerSet {
            points: points.to_vec(),
        }
    }

    #[test]
    fn distance_basics() {
        assert_eq!(euclidean_distance((0.0, 0.0), (0.0, 0.0)), 0.0);
        assert_eq!(euclidean_distance((0.0, 0.0), (3.0, 4.0)), 5.0);
        assert_eq!(
            euclidean_distance((1.0, 2.0), (-3.0, 7.0)),
            euclidean_distance((-3.0, 7.0), (1.0, 2.0))
        );
    }

    #[test]
    fn unambiguous_pairs_match() {
        let origins = set(&[(0.0, 0.0), (10.0, 0.0)]);
        let currents = set(&[(1.0, 0.0), (9.0, 0.0)]);
        let a = match_points(&origins, &currents, 5.0).unwrap();
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert!(a.unmatched_origins.is_empty());
        assert!(a.unmatched_currents.is_empty());
    }

    #[test]
    fn identical_sets_match_identity() {
        let pts = set(&[(1.0, 1.0), (4.0, 2.0), (0.0, 5.0)]);
        let a = match_points(&pts, &pts, 1.0).unwrap();
        let mut pairs = a.pairs.clone();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn empty_sets_are_fine() {
        let a = match_points(&set(&[]), &set(&[(1.0, 1.0)]), 2.0).unwrap();
        assert!(a.pairs.is_empty());
        assert_eq!(a.unmatched_currents, vec![0]);
    }

    #[test]
    fn max_dist_cuts_off_far_points() {
        let a = match_points(&set(&[(0.0, 0.0)]), &set(&[(10.0, 0.0)]), 5.0).unwrap();
        assert!(a.pairs.is_empty());
        assert_eq!(a.unmatched_origins, vec![0]);
        assert_eq!(a.unmatched_currents, vec![0]);
    }

    #[test]
    fn vectors_from_assignment() {
        let origins = set(&[(0.0, 0.0), (10.0, 0.0)]);
        let currents = set(&[(1.0, 0.0), (9.0, 0.0)]);
        let a = match_points(&origins, &currents, 5.0).unwrap();
        let field = vector_field(&origins, &currents, &a).unwrap();
        let disp: Vec<_> = field.displacements().collect();
        assert_eq!(disp, vec![(1.0, 0.0), (-1.0, 0.0)]);
        assert_eq!(average_vector(&field).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn identity_assignment_gives_zero_vectors() {
        let pts = set(&[(2.0, 3.0), (5.0, 6.0)]);
        let a = match_points(&pts, &pts, 1.0).unwrap();
        let field = vector_field(&pts, &pts, &a).unwrap();
        assert!(field.displacements().all(|(dx, dy)| dx == 0.0 && dy == 0.0));
    }

    #[test]
    fn average_of_constant_field() {
        let field = VectorField {
            vectors: vec![((0.0, 0.0), (2.0, 0.0)), ((1.0, 1.0), (3.0, 1.0))],
        };
        assert_eq!(average_vector(&field).unwrap(), (2.0, 0.0));
    }

    #[test]
    fn average_of_empty_field_errors() {
        assert!(average_vector(&VectorField { vectors: vec![] }).is_err());
    }

    #[test]
    fn bad_assignment_index_is_internal_error() {
        let pts = set(&[(0.0, 0.0)]);
        let a = Assignment {
            pairs: vec![(0, 3)],
            unmatched_origins: vec![],
            unmatched_currents: vec![],
        };
        assert!(matches!(
            vector_field(&pts, &pts, &a),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn ridge_interpolates_single_point_at_tiny_alpha() {
        // One repeated sample: prediction must reproduce its own label.
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.2, 1.0, 0.5, 0.2]);
        let y = DMatrix::from_row_slice(2, 2, &[4.0, -1.0, 4.0, -1.0]);
        let (w, b) = ridge_solve(&x, &y, 1e-9).unwrap();
        let pred = DMatrix::from_row_slice(1, 3, &[1.0, 0.5, 0.2]) * &w
            + DMatrix::from_row_slice(1, 2, &[b[0], b[1]]);
        assert!((pred[(0, 0)] - 4.0).abs() < 1e-6);
        assert!((pred[(0, 1)] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn primal_and_dual_ridge_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // n > p forces the primal path; transpose-ish setup forces dual.
        let x = DMatrix::from_fn(12, 5, |_, _| rng.gen_range(-1.0..1.0));
        let y = DMatrix::from_fn(12, 2, |_, _| rng.gen_range(-1.0..1.0));
        let (w_primal, b_primal) = ridge_solve(&x, &y, 3.0).unwrap();
        // Dual path: take only 4 rows so n < p.
        let xs = x.rows(0, 4).into_owned();
        let ys = y.rows(0, 4).into_owned();
        let (w_dual, _) = ridge_solve(&xs, &ys, 3.0).unwrap();
        // Cross-check dual result against explicit primal on same data.
        let x_mean = xs.row_mean();
        let y_mean = ys.row_mean();
        let mut xc = xs.clone();
        for mut r in xc.row_iter_mut() {
            r -= &x_mean;
        }
        let mut yc = ys.clone();
        for mut r in yc.row_iter_mut() {
            r -= &y_mean;
        }
        let mut gram = xc.transpose() * &xc;
        for i in 0..5 {
            gram[(i, i)] += 3.0;
        }
        let w_ref = gram.cholesky().unwrap().solve(&(xc.transpose() * &yc));
        assert!((w_dual.clone() - w_ref).norm() < 1e-9);
        // Primal path sanity: finite and right shape.
        assert_eq!(w_primal.shape(), (5, 2));
        assert_eq!(b_primal.len(), 2);
    }

    #[test]
    fn translate_and_zoom_preserve_shape() {
        let mut bits = vec![0u8; 64];
        bits[3 * 8 + 3] = 1;
        let f = BinaryFrame {
            width: 8,
            height: 8,
            bits,
        };
        let t = translate_frame(&f, 2, 1);
        assert_eq!(t.at(5, 4), 1);
        assert_eq!(t.foreground_count(), 1);
        let z = zoom_frame(&f, 1.0);
        assert_eq!(z.bits, f.bits);
    }

    #[test]
    fn label_file_round_trip() {
        let dir = std::env::temp_dir().join("tactip_labels_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("labels.txt");
        let rows = vec![
            (0u64, vec![(1.5, 2.5), (3.0, 4.0)]),
            (7u64, vec![(0.0, 0.0)]),
        ];
        save_labels(&rows, &path).unwrap();
        assert_eq!(load_labels(&path).unwrap(), rows);
    }
}
