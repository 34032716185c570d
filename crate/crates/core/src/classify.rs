//! Temporal surface classification.
//!
//! Inputs are T consecutive contact-gated frames (stacked vertically) or
//! T consecutive displacement fields (concatenated), standardized with a
//! fitted scaler. Two architectures: a sigmoid FNN over vector stacks and
//! a single-conv CNN (8x8 filters, 1000-unit hidden layer) over image
//! stacks. Training is plain stochastic gradient descent, deterministic
//! given the seed.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------
// Standard scaler
// ---------------------------------------------------------------------

/// Per-feature standardization: z = (x - mean) / std, population std.
/// Zero-variance features keep std = 1 so they map to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(data: &DMatrix<f64>) -> Result<Self> {
        if data.nrows() < 2 {
            return Err(Error::Data("scaler needs at least 2 rows".into()));
        }
        let n = data.nrows() as f64;
        let mut mean = vec![0.0; data.ncols()];
        let mut std = vec![0.0; data.ncols()];
        for c in 0..data.ncols() {
            let col = data.column(c);
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean[c] = m;
            std[c] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Ok(StandardScaler { mean, std })
    }

    pub fn transform(&self, data: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(data.nrows(), data.ncols(), |r, c| {
            (data[(r, c)] - self.mean[c]) / self.std[c]
        })
    }

    pub fn inverse_transform(&self, data: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(data.nrows(), data.ncols(), |r, c| {
            data[(r, c)] * self.std[c] + self.mean[c]
        })
    }
}

// ---------------------------------------------------------------------
// Temporal stacking
// ---------------------------------------------------------------------

/// One preprocessed frame as real-valued pixels, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePixels {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FramePixels {
    pub fn from_binary(frame: &crate::imagery::BinaryFrame) -> Self {
        FramePixels {
            rows: frame.height as usize,
            cols: frame.width as usize,
            data: frame.bits.iter().map(|&b| b as f64).collect(),
        }
    }

    /// Mean-pools by an integer factor; dimensions must divide evenly.
    pub fn pooled(&self, factor: usize) -> Result<FramePixels> {
        if factor == 0 || self.rows % factor != 0 || self.cols % factor != 0 {
            return Err(Error::Parameter(format!(
                "pool factor {} does not divide {}x{}",
                factor, self.rows, self.cols
            )));
        }
        let (pr, pc) = (self.rows / factor, self.cols / factor);
        let mut data = vec![0.0; pr * pc];
        for y in 0..self.rows {
            for x in 0..self.cols {
                data[(y / factor) * pc + x / factor] += self.data[y * self.cols + x];
            }
        }
        let norm = (factor * factor) as f64;
        for v in &mut data {
            *v /= norm;
        }
        Ok(FramePixels {
            rows: pr,
            cols: pc,
            data,
        })
    }
}

/// Stacks the last `t` frames of `history` vertically, oldest first, so
/// the result has shape (rows * t, cols).
pub fn stack_frames(history: &[FramePixels], t: usize) -> Result<FramePixels> {
    if t < 1 {
        return Err(Error::Parameter("T must be >= 1".into()));
    }
    if history.len() < t {
        return Err(Error::Data(format!(
            "need {} frames of history, have {}",
            t,
            history.len()
        )));
    }
    let window = &history[history.len() - t..];
    let (rows, cols) = (window[0].rows, window[0].cols);
    let mut data = Vec::with_capacity(rows * cols * t);
    for frame in window {
        if frame.rows != rows || frame.cols != cols {
            return Err(Error::Data("stacked frames must share dimensions".into()));
        }
        data.extend_from_slice(&frame.data);
    }
    Ok(FramePixels {
        rows: rows * t,
        cols,
        data,
    })
}

/// Concatenates the last `t` flattened vector fields, oldest first.
pub fn stack_vectors(history: &[Vec<f64>], t: usize) -> Result<Vec<f64>> {
    if t < 1 {
        return Err(Error::Parameter("T must be >= 1".into()));
    }
    if history.len() < t {
        return Err(Error::Data(format!(
            "need {} fields of history, have {}",
            t,
            history.len()
        )));
    }
    let window = &history[history.len() - t..];
    let len = window[0].len();
    let mut out = Vec::with_capacity(len * t);
    for field in window {
        if field.len() != len {
            return Err(Error::Data("stacked fields must share length".into()));
        }
        out.extend_from_slice(field);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------

trait Layer {
    fn forward(&mut self, x: &DMatrix<f64>, train: bool, rng: &mut ChaCha8Rng) -> DMatrix<f64>;
    fn backward(&mut self, grad: &DMatrix<f64>) -> DMatrix<f64>;
    fn step(&mut self, lr: f64);
    fn params(&mut self) -> Vec<&mut [f64]>;
    fn grads(&self) -> Vec<&[f64]>;
}

struct Dense {
    w: DMatrix<f64>,
    b: DVector<f64>,
    gw: DMatrix<f64>,
    gb: DVector<f64>,
    cache_x: DMatrix<f64>,
}

impl Dense {
    fn new(input: usize, output: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / (input + output) as f64).sqrt();
        Dense {
            w: DMatrix::from_fn(input, output, |_, _| rng.gen_range(-limit..limit)),
            b: DVector::zeros(output),
            gw: DMatrix::zeros(input, output),
            gb: DVector::zeros(output),
            cache_x: DMatrix::zeros(0, 0),
        }
    }
}

impl Layer for Dense {
    fn forward(&mut self, x: &DMatrix<f64>, train: bool, _rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        if train {
            self.cache_x = x.clone();
        }
        let mut out = x * &self.w;
        for mut row in out.row_iter_mut() {
            row += self.b.transpose();
        }
        out
    }

    fn backward(&mut self, grad: &DMatrix<f64>) -> DMatrix<f64> {
        self.gw = self.cache_x.transpose() * grad;
        self.gb = grad.row_sum().transpose();
        grad * self.w.transpose()
    }

    fn step(&mut self, lr: f64) {
        self.w -= lr * &self.gw;
        self.b -= lr * &self.gb;
    }

    fn params(&mut self) -> Vec<&mut [f64]> {
        vec![self.w.as_mut_slice(), self.b.as_mut_slice()]
    }

    fn grads(&self) -> Vec<&[f64]> {
        vec![self.gw.as_slice(), self.gb.as_slice()]
    }
}

struct SigmoidLayer {
    cache_y: DMatrix<f64>,
}

impl Layer for SigmoidLayer {
    fn forward(&mut self, x: &DMatrix<f64>, train: bool, _rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let y = x.map(|v| 1.0 / (1.0 + (-v).exp()));
        if train {
            self.cache_y = y.clone();
        }
        y
    }

    fn backward(&mut self, grad: &DMatrix<f64>) -> DMatrix<f64> {
        grad.zip_map(&self.cache_y, |g, y| g * y * (1.0 - y))
    }

    fn step(&mut self, _lr: f64) {}

    fn params(&mut self) -> Vec<&mut [f64]> {
        Vec::new()
    }

    fn grads(&self) -> Vec<&[f64]> {
        Vec::new()
    }
}

/// Inverted dropout: activations are scaled by 1/(1-rate) at train time
/// so the eval-mode forward pass needs no rescaling.
struct DropoutLayer {
    rate: f64,
    mask: DMatrix<f64>,
}

impl Layer for DropoutLayer {
    fn forward(&mut self, x: &DMatrix<f64>, train: bool, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        if !train || self.rate == 0.0 {
            return x.clone();
        }
        let keep = 1.0 - self.rate;
        self.mask = DMatrix::from_fn(x.nrows(), x.ncols(), |_, _| {
            if rng.gen::<f64>() < keep {
                1.0 / keep
            } else {
                0.0
            }
        });
        x.component_mul(&self.mask)
    }

    fn backward(&mut self, grad: &DMatrix<f64>) -> DMatrix<f64> {
        if self.rate == 0.0 {
            return grad.clone();
        }
        grad.component_mul(&self.mask)
    }

    fn step(&mut self, _lr: f64) {}

    fn params(&mut self) -> Vec<&mut [f64]> {
        Vec::new()
    }

    fn grads(&self) -> Vec<&[f64]> {
        Vec::new()
    }
}

/// Single 2D convolution over a one-channel image, implemented as
/// im2col + matrix product. Output is flattened (position-major, then
/// filter).
struct ConvLayer {
    in_rows: usize,
    in_cols: usize,
    filter: usize,
    stride: usize,
    filters: usize,
    w: DMatrix<f64>, // (filter*filter) x filters
    b: DVector<f64>,
    gw: DMatrix<f64>,
    gb: DVector<f64>,
    cache_cols: Vec<DMatrix<f64>>,
}

impl ConvLayer {
    fn new(
        in_rows: usize,
        in_cols: usize,
        filter: usize,
        stride: usize,
        filters: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        if in_rows < filter || in_cols < filter {
            return Err(Error::Data(format!(
                "input {}x{} smaller than {}x{} filter",
                in_rows, in_cols, filter, filter
            )));
        }
        let fan_in = filter * filter;
        let limit = (6.0 / (fan_in + filters) as f64).sqrt();
        Ok(ConvLayer {
            in_rows,
            in_cols,
            filter,
            stride,
            filters,
            w: DMatrix::from_fn(fan_in, filters, |_, _| rng.gen_range(-limit..limit)),
            b: DVector::zeros(filters),
            gw: DMatrix::zeros(fan_in, filters),
            gb: DVector::zeros(filters),
            cache_cols: Vec::new(),
        })
    }

    fn out_rows(&self) -> usize {
        (self.in_rows - self.filter) / self.stride + 1
    }

    fn out_cols(&self) -> usize {
        (self.in_cols - self.filter) / self.stride + 1
    }

    pub fn output_len(&self) -> usize {
        self.out_rows() * self.out_cols() * self.filters
    }

    fn im2col(&self, sample: &[f64]) -> DMatrix<f64> {
        let (or, oc, f) = (self.out_rows(), self.out_cols(), self.filter);
        let mut cols = DMatrix::zeros(or * oc, f * f);
        for py in 0..or {
            for px in 0..oc {
                let patch = py * oc + px;
                let (y0, x0) = (py * self.stride, px * self.stride);
                for fy in 0..f {
                    for fx in 0..f {
                        cols[(patch, fy * f + fx)] =
                            sample[(y0 + fy) * self.in_cols + x0 + fx];
                    }
                }
            }
        }
        cols
    }
}

impl Layer for ConvLayer {
    fn forward(&mut self, x: &DMatrix<f64>, train: bool, _rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let n = x.nrows();
        let positions = self.out_rows() * self.out_cols();
        let mut out = DMatrix::zeros(n, positions * self.filters);
        if train {
            self.cache_cols.clear();
        }
        for s in 0..n {
            let sample: Vec<f64> = x.row(s).iter().copied().collect();
            let cols = self.im2col(&sample);
            let mut result = &cols * &self.w; // positions x filters
            for mut row in result.row_iter_mut() {
                row += self.b.transpose();
            }
            for p in 0..positions {
                for k in 0..self.filters {
                    out[(s, p * self.filters + k)] = result[(p, k)];
                }
            }
            if train {
                self.cache_cols.push(cols);
            }
        }
        out
    }

    fn backward(&mut self, grad: &DMatrix<f64>) -> DMatrix<f64> {
        let n = grad.nrows();
        let positions = self.out_rows() * self.out_cols();
        let (f, oc) = (self.filter, self.out_cols());
        self.gw.fill(0.0);
        self.gb.fill(0.0);
        let mut dx = DMatrix::zeros(n, self.in_rows * self.in_cols);
        for s in 0..n {
            let mut dout = DMatrix::zeros(positions, self.filters);
            for p in 0..positions {
                for k in 0..self.filters {
                    dout[(p, k)] = grad[(s, p * self.filters + k)];
                }
            }
            self.gw += self.cache_cols[s].transpose() * &dout;
            self.gb += dout.row_sum().transpose();
            let dcols = dout * self.w.transpose(); // positions x f*f
            for py in 0..self.out_rows() {
                for px in 0..oc {
                    let patch = py * oc + px;
                    let (y0, x0) = (py * self.stride, px * self.stride);
                    for fy in 0..f {
                        for fx in 0..f {
                            dx[(s, (y0 + fy) * self.in_cols + x0 + fx)] +=
                                dcols[(patch, fy * f + fx)];
                        }
                    }
                }
            }
        }
        dx
    }

    fn step(&mut self, lr: f64) {
        self.w -= lr * &self.gw;
        self.b -= lr * &self.gb;
    }

    fn params(&mut self) -> Vec<&mut [f64]> {
        vec![self.w.as_mut_slice(), self.b.as_mut_slice()]
    }

    fn grads(&self) -> Vec<&[f64]> {
        vec![self.gw.as_slice(), self.gb.as_slice()]
    }
}

// ---------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------

/// Architecture descriptor, also what gets serialized.
#[derive(Debug, Clone, PartialEq)]
pub enum Architecture {
    /// Vector-stack FNN: [input, h1, h2, classes], sigmoid hiddens.
    Fnn {
        input: usize,
        hidden: (usize, usize),
        classes: usize,
        dropout: f64,
    },
    /// Image-stack CNN: one conv (8x8 filters) + 1000-unit dense hidden.
    Cnn {
        in_rows: usize,
        in_cols: usize,
        filters: usize,
        stride: usize,
        hidden: usize,
        classes: usize,
        dropout: f64,
    },
}

impl Architecture {
    pub fn classes(&self) -> usize {
        match self {
            Architecture::Fnn { classes, .. } => *classes,
            Architecture::Cnn { classes, .. } => *classes,
        }
    }

    pub fn input_len(&self) -> usize {
        match self {
            Architecture::Fnn { input, .. } => *input,
            Architecture::Cnn {
                in_rows, in_cols, ..
            } => in_rows * in_cols,
        }
    }
}

pub const CONV_FILTER: usize = 8;
pub const CNN_HIDDEN: usize = 1000;
pub const DEFAULT_DROPOUT: f64 = 0.2;

pub struct Classifier {
    pub arch: Architecture,
    pub scaler: Option<StandardScaler>,
    layers: Vec<Box<dyn Layer>>,
    rng: ChaCha8Rng,
}

impl Classifier {
    pub fn new(arch: Architecture, seed: u64) -> Result<Self> {
        let mut init_rng = ChaCha8Rng::seed_from_u64(seed);
        let layers: Vec<Box<dyn Layer>> = match arch {
            Architecture::Fnn {
                input,
                hidden: (h1, h2),
                classes,
                dropout,
            } => vec![
                Box::new(Dense::new(input, h1, &mut init_rng)),
                Box::new(SigmoidLayer {
                    cache_y: DMatrix::zeros(0, 0),
                }),
                Box::new(DropoutLayer {
                    rate: dropout,
                    mask: DMatrix::zeros(0, 0),
                }),
                Box::new(Dense::new(h1, h2, &mut init_rng)),
                Box::new(SigmoidLayer {
                    cache_y: DMatrix::zeros(0, 0),
                }),
                Box::new(DropoutLayer {
                    rate: dropout,
                    mask: DMatrix::zeros(0, 0),
                }),
                Box::new(Dense::new(h2, classes, &mut init_rng)),
            ],
            Architecture::Cnn {
                in_rows,
                in_cols,
                filters,
                stride,
                hidden,
                classes,
                dropout,
            } => {
                let conv = ConvLayer::new(
                    in_rows,
                    in_cols,
                    CONV_FILTER,
                    stride,
                    filters,
                    &mut init_rng,
                )?;
                let conv_out = conv.output_len();
                vec![
                    Box::new(conv) as Box<dyn Layer>,
                    Box::new(SigmoidLayer {
                        cache_y: DMatrix::zeros(0, 0),
                    }),
                    Box::new(DropoutLayer {
                        rate: dropout,
                        mask: DMatrix::zeros(0, 0),
                    }),
                    Box::new(Dense::new(conv_out, hidden, &mut init_rng)),
                    Box::new(SigmoidLayer {
                        cache_y: DMatrix::zeros(0, 0),
                    }),
                    Box::new(DropoutLayer {
                        rate: dropout,
                        mask: DMatrix::zeros(0, 0),
                    }),
                    Box::new(Dense::new(hidden, classes, &mut init_rng)),
                ]
            }
        };
        Ok(Classifier {
            arch,
            scaler: None,
            layers,
            rng: init_rng,
        })
    }

    fn forward(&mut self, x: &DMatrix<f64>, train: bool) -> DMatrix<f64> {
        let mut cur = x.clone();
        for layer in &mut self.layers {
            cur = layer.forward(&cur, train, &mut self.rng);
        }
        cur
    }

    fn backward(&mut self, grad: &DMatrix<f64>) {
        let mut cur = grad.clone();
        for layer in self.layers.iter_mut().rev() {
            cur = layer.backward(&cur);
        }
    }

    fn step(&mut self, lr: f64) {
        for layer in &mut self.layers {
            layer.step(lr);
        }
    }

    /// Class probabilities for raw (unscaled) inputs, eval mode.
    pub fn scores(&mut self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let scaled = match &self.scaler {
            Some(s) => s.transform(x),
            None => x.clone(),
        };
        softmax(&self.forward(&scaled, false))
    }

    /// Argmax label and scores for one raw input row.
    pub fn predict(&mut self, input: &[f64]) -> Result<(usize, Vec<f64>)> {
        if input.len() != self.arch.input_len() {
            return Err(Error::Parameter(format!(
                "input length {} does not match architecture ({})",
                input.len(),
                self.arch.input_len()
            )));
        }
        let x = DMatrix::from_row_slice(1, input.len(), input);
        let scores = self.scores(&x);
        let row: Vec<f64> = scores.row(0).iter().copied().collect();
        let label = argmax(&row);
        Ok((label, row))
    }

    /// Fraction of rows whose argmax matches the label, eval mode.
    pub fn evaluate(&mut self, x: &DMatrix<f64>, labels: &[usize]) -> Result<f64> {
        if x.nrows() != labels.len() {
            return Err(Error::Parameter("labels do not match rows".into()));
        }
        if x.nrows() == 0 {
            return Err(Error::Data("cannot evaluate on an empty set".into()));
        }
        let scores = self.scores(x);
        let correct = labels
            .iter()
            .enumerate()
            .filter(|(i, &l)| {
                let row: Vec<f64> = scores.row(*i).iter().copied().collect();
                argmax(&row) == l
            })
            .count();
        Ok(correct as f64 / labels.len() as f64)
    }

    /// All trainable parameters flattened; used by serialization and
    /// finite-difference checks.
    pub fn flat_params(&mut self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            for slice in layer.params() {
                out.extend_from_slice(slice);
            }
        }
        out
    }

    pub fn set_flat_params(&mut self, values: &[f64]) -> Result<()> {
        let mut offset = 0;
        for layer in &mut self.layers {
            for slice in layer.params() {
                let len = slice.len();
                if offset + len > values.len() {
                    return Err(Error::Data("parameter vector too short".into()));
                }
                slice.copy_from_slice(&values[offset..offset + len]);
                offset += len;
            }
        }
        if offset != values.len() {
            return Err(Error::Data("parameter vector too long".into()));
        }
        Ok(())
    }

    fn flat_grads(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            for slice in layer.grads() {
                out.extend_from_slice(slice);
            }
        }
        out
    }

    /// Mean cross-entropy on scaled inputs without updating anything.
    pub fn loss(&mut self, scaled_x: &DMatrix<f64>, labels: &[usize]) -> f64 {
        let logits = self.forward(scaled_x, false);
        cross_entropy(&softmax(&logits), labels)
    }

    /// One full forward/backward in train mode (dropout active unless the
    /// architecture's rate is zero); returns loss and leaves gradients in
    /// the layers.
    pub fn loss_and_grad(&mut self, scaled_x: &DMatrix<f64>, labels: &[usize]) -> (f64, Vec<f64>) {
        let logits = self.forward(scaled_x, true);
        let probs = softmax(&logits);
        let loss = cross_entropy(&probs, labels);
        let grad = ce_gradient(&probs, labels);
        self.backward(&grad);
        (loss, self.flat_grads())
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

fn softmax(logits: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = logits.clone();
    for mut row in out.row_iter_mut() {
        let max = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

fn cross_entropy(probs: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| -(probs[(i, l)].max(1e-300)).ln())
        .sum::<f64>()
        / n
}

fn ce_gradient(probs: &DMatrix<f64>, labels: &[usize]) -> DMatrix<f64> {
    let n = labels.len() as f64;
    let mut grad = probs.clone();
    for (i, &l) in labels.iter().enumerate() {
        grad[(i, l)] -= 1.0;
    }
    grad / n
}

// ---------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 0.05,
            batch: 32,
            seed: 0,
        }
    }
}

/// Per-epoch training loss and accuracy, for plotting.
#[derive(Debug, Clone, Default)]
pub struct TrainCurve {
    pub loss: Vec<f64>,
    pub accuracy: Vec<f64>,
}

/// Fits the scaler on the training inputs, then runs seeded SGD.
/// Identical seeds give bit-identical weights and curves.
pub fn train_sgd(
    model: &mut Classifier,
    inputs: &DMatrix<f64>,
    labels: &[usize],
    config: &TrainConfig,
) -> Result<TrainCurve> {
    if inputs.nrows() == 0 || inputs.nrows() != labels.len() {
        return Err(Error::Data("empty or mismatched training set".into()));
    }
    if inputs.ncols() != self_input_len(model) {
        return Err(Error::Data(format!(
            "input width {} does not match architecture ({})",
            inputs.ncols(),
            self_input_len(model)
        )));
    }
    if labels.iter().any(|&l| l >= model.arch.classes()) {
        return Err(Error::Data("label outside class range".into()));
    }
    let scaler = StandardScaler::fit(inputs)?;
    let scaled = scaler.transform(inputs);
    model.scaler = Some(scaler);
    model.rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let n = scaled.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut curve = TrainCurve::default();
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0.0;
        for chunk in order.chunks(config.batch.max(1)) {
            let x = DMatrix::from_fn(chunk.len(), scaled.ncols(), |r, c| scaled[(chunk[r], c)]);
            let y: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, _) = model.loss_and_grad(&x, &y);
            if !loss.is_finite() {
                return Err(Error::Training { epoch });
            }
            model.step(config.learning_rate);
            epoch_loss += loss;
            batches += 1.0;
        }
        let logits = model.forward(&scaled, false);
        let probs = softmax(&logits);
        let correct = labels
            .iter()
            .enumerate()
            .filter(|(i, &l)| {
                let row: Vec<f64> = probs.row(*i).iter().copied().collect();
                argmax(&row) == l
            })
            .count();
        curve.loss.push(epoch_loss / batches);
        curve.accuracy.push(correct as f64 / n as f64);
    }
    Ok(curve)
}

fn self_input_len(model: &Classifier) -> usize {
    model.arch.input_len()
}

// ---------------------------------------------------------------------
// T sweep
// ---------------------------------------------------------------------

/// One train/test split ready for a classifier.
pub struct SplitData {
    pub train_x: DMatrix<f64>,
    pub train_y: Vec<usize>,
    pub test_x: DMatrix<f64>,
    pub test_y: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub t: usize,
    pub mean: f64,
    pub std: f64,
    pub accuracies: Vec<f64>,
}

/// For each T, builds `trials` seeded datasets, trains a fresh FNN on
/// each, and reports held-out accuracy mean and standard deviation.
pub fn t_sweep<F>(
    mut builder: F,
    t_values: &[usize],
    trials: usize,
    hidden: (usize, usize),
    train_config: &TrainConfig,
    classes: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>>
where
    F: FnMut(usize, u64) -> Result<SplitData>,
{
    let mut points = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let mut accuracies = Vec::with_capacity(trials);
        for trial in 0..trials {
            let trial_seed = seed
                .wrapping_add((t as u64) << 32)
                .wrapping_add(trial as u64);
            let data = builder(t, trial_seed)?;
            let arch = Architecture::Fnn {
                input: data.train_x.ncols(),
                hidden,
                classes,
                dropout: DEFAULT_DROPOUT,
            };
            let mut model = Classifier::new(arch, trial_seed)?;
            let config = TrainConfig {
                seed: trial_seed,
                ..train_config.clone()
            };
            train_sgd(&mut model, &data.train_x, &data.train_y, &config)?;
            accuracies.push(model.evaluate(&data.test_x, &data.test_y)?);
        }
        let mean = accuracies.iter().sum::<f64>() / trials as f64;
        let var = accuracies
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / trials as f64;
        points.push(SweepPoint {
            t,
            mean,
            std: var.sqrt(),
            accuracies,
        });
    }
    Ok(points)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

// ---------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------

const NET_MAGIC: &[u8; 4] = b"TACN";

pub fn save_classifier(model: &mut Classifier, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(NET_MAGIC);
    match model.arch {
        Architecture::Fnn {
            input,
            hidden: (h1, h2),
            classes,
            dropout,
        } => {
            out.push(0u8);
            for v in [input, h1, h2, classes] {
                out.extend_from_slice(&(v as u32).to_le_bytes());
            }
            out.extend_from_slice(&dropout.to_le_bytes());
        }
        Architecture::Cnn {
            in_rows,
            in_cols,
            filters,
            stride,
            hidden,
            classes,
            dropout,
        } => {
            out.push(1u8);
            for v in [in_rows, in_cols, filters, stride, hidden, classes] {
                out.extend_from_slice(&(v as u32).to_le_bytes());
            }
            out.extend_from_slice(&dropout.to_le_bytes());
        }
    }
    let scaler = model
        .scaler
        .as_ref()
        .ok_or_else(|| Error::Data("cannot save an untrained classifier".into()))?;
    out.extend_from_slice(&(scaler.mean.len() as u32).to_le_bytes());
    for v in scaler.mean.iter().chain(scaler.std.iter()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let params = model.flat_params();
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for v in params {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

pub fn load_classifier(path: &Path) -> Result<Classifier> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let fmt = |reason: &str, offset: usize| Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
        offset: offset as u64,
    };
    if raw.len() < 5 || &raw[..4] != NET_MAGIC {
        return Err(fmt("missing TACN magic", 0));
    }
    let mut off = 5;
    let read_u32 = |off: &mut usize| -> Result<usize> {
        if *off + 4 > raw.len() {
            return Err(fmt("truncated header", *off));
        }
        let v = u32::from_le_bytes(raw[*off..*off + 4].try_into().unwrap()) as usize;
        *off += 4;
        Ok(v)
    };
    let arch = match raw[4] {
        0 => {
            let input = read_u32(&mut off)?;
            let h1 = read_u32(&mut off)?;
            let h2 = read_u32(&mut off)?;
            let classes = read_u32(&mut off)?;
            if off + 8 > raw.len() {
                return Err(fmt("truncated dropout", off));
            }
            let dropout = f64::from_le_bytes(raw[off..off + 8].try_into().unwrap());
            off += 8;
            Architecture::Fnn {
                input,
                hidden: (h1, h2),
                classes,
                dropout,
            }
        }
        1 => {
            let in_rows = read_u32(&mut off)?;
            let in_cols = read_u32(&mut off)?;
            let filters = read_u32(&mut off)?;
            let stride = read_u32(&mut off)?;
            let hidden = read_u32(&mut off)?;
            let classes = read_u32(&mut off)?;
            if off + 8 > raw.len() {
                return Err(fmt("truncated dropout", off));
            }
            let dropout = f64::from_le_bytes(raw[off..off + 8].try_into().unwrap());
            off += 8;
            Architecture::Cnn {
                in_rows,
                in_cols,
                filters,
                stride,
                hidden,
                classes,
                dropout,
            }
        }
        other => return Err(fmt(&format!("unknown architecture tag {}", other), 4)),
    };
    let scaler_len = {
        if off + 4 > raw.len() {
            return Err(fmt("truncated scaler length", off));
        }
        let v = u32::from_le_bytes(raw[off..off + 4].try_into().unwrap()) as usize;
        off += 4;
        v
    };
    let read_f64s = |off: &mut usize, count: usize| -> Result<Vec<f64>> {
        if *off + 8 * count > raw.len() {
            return Err(fmt("truncated float block", *off));
        }
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            out.push(f64::from_le_bytes(
                raw[*off + 8 * i..*off + 8 * i + 8].try_into().unwrap(),
            ));
        }
        *off += 8 * count;
        Ok(out)
    };
    let mean = read_f64s(&mut off, scaler_len)?;
    let std = read_f64s(&mut off, scaler_len)?;
    if off + 8 > raw.len() {
        return Err(fmt("truncated parameter count", off));
    }
    let param_count = u64::from_le_bytes(raw[off..off + 8].try_into().unwrap()) as usize;
    off += 8;
    let params = read_f64s(&mut off, param_count)?;
    if off != raw.len() {
        return Err(fmt("trailing bytes", off));
    }
    let mut model = Classifier::new(arch, 0)?;
    model.scaler = Some(StandardScaler { mean, std });
    model.set_flat_params(&params)?;
    Ok(model)
}
