//! Receptive-field contact grid.
//!
//! The tactile image is tiled into g x g cells. Each update takes the
//! absolute per-pixel difference between the current and previous frame,
//! averages it per cell, subtracts the global mean difference (noise
//! floor) and a temporal dampener, and accumulates the result into a
//! persistent activation matrix clamped at zero. A stimulus therefore
//! leaves a fading footprint for a few frames after it is removed.

use crate::error::{Error, Result};
use crate::imagery::GrayFrame;

#[derive(Debug, Clone, Copy)]
struct CellBounds {
    x0: u32,
    y0: u32,
    x1: u32, // exclusive
    y1: u32, // exclusive
}

/// Persistent g x g activation grid with temporal decay.
#[derive(Debug, Clone)]
pub struct ForceGrid {
    grid_size: u32,
    gamma: f64,
    activation: Vec<f64>,
    prev_frame: GrayFrame,
    cells: Vec<CellBounds>,
}

impl ForceGrid {
    /// `first_frame` seeds the comparison frame; activations start at zero.
    pub fn new(first_frame: GrayFrame, grid_size: u32, gamma: f64) -> Result<Self> {
        if grid_size == 0 || grid_size > first_frame.width.min(first_frame.height) {
            return Err(Error::Parameter(format!(
                "grid size {} out of range for {}x{} frame",
                grid_size, first_frame.width, first_frame.height
            )));
        }
        if gamma < 0.0 {
            return Err(Error::Parameter("gamma must be >= 0".into()));
        }
        let cells = tile(first_frame.width, first_frame.height, grid_size);
        Ok(ForceGrid {
            grid_size,
            gamma,
            activation: vec![0.0; (grid_size * grid_size) as usize],
            prev_frame: first_frame,
            cells,
        })
    }

    pub fn grid_size(&self) -> u32 {
        self.grid_size
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Row-major cell activations.
    pub fn activation(&self) -> &[f64] {
        &self.activation
    }

    pub fn total_activation(&self) -> f64 {
        self.activation.iter().sum()
    }

    /// Folds one frame into the grid. For each cell:
    /// `a <- max(0, a + mean_cell|F_t - F_prev| - mean_global|F_t - F_prev| - gamma)`.
    pub fn update(&mut self, frame: GrayFrame) -> Result<()> {
        if frame.width != self.prev_frame.width || frame.height != self.prev_frame.height {
            return Err(Error::Parameter(format!(
                "frame size {}x{} does not match grid's {}x{}",
                frame.width, frame.height, self.prev_frame.width, self.prev_frame.height
            )));
        }
        let n = (frame.width * frame.height) as f64;
        let mut global_sum = 0.0;
        for (a, b) in frame.data.iter().zip(self.prev_frame.data.iter()) {
            global_sum += (*a as f64 - *b as f64).abs();
        }
        let global_mean = global_sum / n;
        for (cell, act) in self.cells.iter().zip(self.activation.iter_mut()) {
            let mut sum = 0.0;
            for y in cell.y0..cell.y1 {
                let row = (y * frame.width) as usize;
                for x in cell.x0..cell.x1 {
                    let i = row + x as usize;
                    sum += (frame.data[i] as f64 - self.prev_frame.data[i] as f64).abs();
                }
            }
            let pixels = ((cell.x1 - cell.x0) * (cell.y1 - cell.y0)) as f64;
            *act = (*act + sum / pixels - global_mean - self.gamma).max(0.0);
        }
        self.prev_frame = frame;
        Ok(())
    }

    /// True iff the summed activation exceeds `threshold`; also returns the sum.
    pub fn contact_detected(&self, threshold: f64) -> Result<(bool, f64)> {
        if threshold < 0.0 {
            return Err(Error::Parameter("threshold must be >= 0".into()));
        }
        let total = self.total_activation();
        Ok((total > threshold, total))
    }
}

/// Cells tile the frame exactly; remainder pixels go to the last row/column.
fn tile(width: u32, height: u32, g: u32) -> Vec<CellBounds> {
    let cw = width / g;
    let ch = height / g;
    let mut cells = Vec::with_capacity((g * g) as usize);
    for gy in 0..g {
        let y0 = gy * ch;
        let y1 = if gy == g - 1 { height } else { (gy + 1) * ch };
        for gx in 0..g {
            let x0 = gx * cw;
            let x1 = if gx == g - 1 { width } else { (gx + 1) * cw };
            cells.push(CellBounds { x0, y0, x1, y1 });
        }
    }
    cells
}
