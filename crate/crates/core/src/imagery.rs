//! Frame representation and preprocessing: adaptive binary thresholding,
//! large-blob (glare) removal, and blob centroid extraction.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Raw grayscale sensor frame, row-major, intensities in 0..=255.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
    /// Frame index within its stream.
    pub timestamp: u64,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>, timestamp: u64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter("frame dimensions must be positive".into()));
        }
        if data.len() != (width as usize) * (height as usize) {
            return Err(Error::Data(format!(
                "frame data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(GrayFrame {
            width,
            height,
            data,
            timestamp,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        GrayFrame {
            width,
            height,
            data: vec![value; (width * height) as usize],
            timestamp: 0,
        }
    }

    #[inline]
    pub fn at(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }

    /// Writes the frame as a binary PGM (P5).
    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let mut out = Vec::with_capacity(self.data.len() + 32);
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)
            .expect("in-memory write cannot fail");
        out.extend_from_slice(&self.data);
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads a binary PGM (P5) file.
    pub fn load_pgm(path: &Path) -> Result<Self> {
        let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let bad = |reason: &str, offset: usize| Error::Format {
            path: path.to_path_buf(),
            reason: reason.into(),
            offset: offset as u64,
        };
        if raw.len() < 2 || &raw[..2] != b"P5" {
            return Err(bad("missing P5 magic", 0));
        }
        // Header: magic, width, height, maxval, separated by whitespace.
        let mut pos = 2;
        let mut fields = Vec::with_capacity(3);
        while fields.len() < 3 {
            while pos < raw.len() && raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < raw.len() && raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < raw.len() && !raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header", start));
            }
            let text = std::str::from_utf8(&raw[start..pos])
                .map_err(|_| bad("non-ascii header field", start))?;
            let value: u32 = text.parse().map_err(|_| bad("bad header integer", start))?;
            fields.push(value);
        }
        let (width, height, maxval) = (fields[0], fields[1], fields[2]);
        if maxval != 255 {
            return Err(bad("only maxval 255 supported", pos));
        }
        pos += 1; // single whitespace after maxval
        let expected = (width as usize) * (height as usize);
        if raw.len() < pos + expected {
            return Err(bad("pixel data truncated", raw.len()));
        }
        GrayFrame::new(width, height, raw[pos..pos + expected].to_vec(), 0)
    }
}

/// Thresholded frame; every element is 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryFrame {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<u8>,
}

impl BinaryFrame {
    #[inline]
    pub fn at(&self, x: u32, y: u32) -> u8 {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Renders the mask back to a 0/255 grayscale frame.
    pub fn to_gray(&self, timestamp: u64) -> GrayFrame {
        GrayFrame {
            width: self.width,
            height: self.height,
            data: self.bits.iter().map(|&b| if b != 0 { 255 } else { 0 }).collect(),
            timestamp,
        }
    }
}

/// One 4-connected foreground component.
#[derive(Debug, Clone)]
pub struct Blob {
    pub pixels: Vec<(u32, u32)>,
    pub area: usize,
    pub centroid: (f64, f64),
}

/// Ordered set of detected marker centroids, pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerSet {
    pub points: Vec<(f64, f64)>,
}

impl MarkerSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Binarizes against a local mean over an edge-clamped square window:
/// a pixel is foreground iff its intensity exceeds the window mean plus
/// `offset`.
pub fn adaptive_threshold(frame: &GrayFrame, window: u32, offset: f64) -> Result<BinaryFrame> {
    if window % 2 == 0 || window < 3 || window > frame.width.min(frame.height) {
        return Err(Error::Parameter(format!(
            "window {} must be odd and within 3..={}",
            window,
            frame.width.min(frame.height)
        )));
    }
    let (w, h) = (frame.width as i64, frame.height as i64);
    // Summed-area table, (w+1) x (h+1).
    let stride = (w + 1) as usize;
    let mut sat = vec![0u64; stride * (h + 1) as usize];
    for y in 0..h as usize {
        let mut row_sum = 0u64;
        for x in 0..w as usize {
            row_sum += frame.data[y * w as usize + x] as u64;
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row_sum;
        }
    }
    let r = (window / 2) as i64;
    let mut bits = vec![0u8; (w * h) as usize];
    for y in 0..h {
        let y0 = (y - r).max(0) as usize;
        let y1 = ((y + r).min(h - 1) + 1) as usize;
        for x in 0..w {
            let x0 = (x - r).max(0) as usize;
            let x1 = ((x + r).min(w - 1) + 1) as usize;
            let sum = sat[y1 * stride + x1] + sat[y0 * stride + x0]
                - sat[y0 * stride + x1]
                - sat[y1 * stride + x0];
            let count = ((y1 - y0) * (x1 - x0)) as f64;
            let mean = sum as f64 / count;
            let v = frame.data[(y * w + x) as usize] as f64;
            if v > mean + offset {
                bits[(y * w + x) as usize] = 1;
            }
        }
    }
    Ok(BinaryFrame {
        width: frame.width,
        height: frame.height,
        bits,
    })
}

/// Labels 4-connected foreground components.
pub fn find_blobs(frame: &BinaryFrame) -> Vec<Blob> {
    let (w, h) = (frame.width as usize, frame.height as usize);
    let mut seen = vec![false; w * h];
    let mut blobs = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if frame.bits[start] == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        let (mut sx, mut sy) = (0f64, 0f64);
        while let Some(idx) = stack.pop() {
            let (x, y) = (idx % w, idx / w);
            pixels.push((x as u32, y as u32));
            sx += x as f64;
            sy += y as f64;
            let mut visit = |n: usize| {
                if frame.bits[n] != 0 && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if x > 0 {
                visit(idx - 1);
            }
            if x + 1 < w {
                visit(idx + 1);
            }
            if y > 0 {
                visit(idx - w);
            }
            if y + 1 < h {
                visit(idx + w);
            }
        }
        let area = pixels.len();
        blobs.push(Blob {
            area,
            centroid: (sx / area as f64, sy / area as f64),
            pixels,
        });
    }
    blobs
}

/// Clears every 4-connected component whose area strictly exceeds
/// `max_area`. Used to drop LED-glare blobs, which are an order of
/// magnitude larger than the markers.
pub fn remove_large_blobs(frame: &BinaryFrame, max_area: usize) -> Result<BinaryFrame> {
    if max_area < 1 {
        return Err(Error::Parameter("max_area must be >= 1".into()));
    }
    let mut out = frame.clone();
    for blob in find_blobs(frame) {
        if blob.area > max_area {
            for (x, y) in blob.pixels {
                out.bits[(y * out.width + x) as usize] = 0;
            }
        }
    }
    Ok(out)
}

/// One centroid per component with area >= `min_area`, ordered by
/// (centroid y, centroid x) so downstream matching is reproducible.
pub fn extract_centroids(frame: &BinaryFrame, min_area: usize) -> Result<MarkerSet> {
    if min_area < 1 {
        return Err(Error::Parameter("min_area must be >= 1".into()));
    }
    let mut points: Vec<(f64, f64)> = find_blobs(frame)
        .into_iter()
        .filter(|b| b.area >= min_area)
        .map(|b| b.centroid)
        .collect();
    points.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).expect("finite centroids"));
    Ok(MarkerSet { points })
}
