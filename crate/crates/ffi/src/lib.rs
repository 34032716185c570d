//! C ABI over the tactile pipeline. All functions return a status code;
//! on failure `tactip_last_error` holds a message for the calling thread.
//! Handles are opaque and must be released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use tactip_core::contact::ForceGrid;
use tactip_core::imagery::{
    adaptive_threshold, extract_centroids, remove_large_blobs, BinaryFrame, GrayFrame,
};
use tactip_core::simulator::{run_script, SensorConfig, StimulusScript};
use tactip_core::tracking::{load_marker_model, predict_markers, RidgeMarkerModel};
use tactip_core::Error;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TactipStatus {
    Ok = 0,
    /// Bad argument: null pointer, wrong size, out-of-range value.
    Parameter = 1,
    /// Malformed data or file contents.
    Data = 2,
    /// Filesystem failure.
    Io = 3,
    Internal = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn fail(status: TactipStatus, message: &str) -> TactipStatus {
    let safe = CString::new(message.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = safe);
    status
}

fn fail_err(err: Error) -> TactipStatus {
    let status = match &err {
        Error::Parameter(_) | Error::Script { .. } => TactipStatus::Parameter,
        Error::Io { .. } => TactipStatus::Io,
        Error::Internal(_) => TactipStatus::Internal,
        _ => TactipStatus::Data,
    };
    fail(status, &err.to_string())
}

/// Message for the most recent failure on this thread. Valid until the
/// next failing call; never null.
#[no_mangle]
pub extern "C" fn tactip_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn frame_from_raw(
    pixels: *const u8,
    width: u32,
    height: u32,
) -> Result<GrayFrame, TactipStatus> {
    if pixels.is_null() {
        return Err(fail(TactipStatus::Parameter, "pixels is null"));
    }
    let len = width as usize * height as usize;
    let data = std::slice::from_raw_parts(pixels, len).to_vec();
    GrayFrame::new(width, height, data, 0).map_err(|e| fail_err(e))
}

unsafe fn binary_from_raw(
    bits: *const u8,
    width: u32,
    height: u32,
) -> Result<BinaryFrame, TactipStatus> {
    if bits.is_null() {
        return Err(fail(TactipStatus::Parameter, "bits is null"));
    }
    let len = width as usize * height as usize;
    let data: Vec<u8> = std::slice::from_raw_parts(bits, len)
        .iter()
        .map(|&b| (b != 0) as u8)
        .collect();
    Ok(BinaryFrame {
        width,
        height,
        bits: data,
    })
}

unsafe fn path_from_raw<'a>(ptr: *const c_char) -> Result<&'a Path, TactipStatus> {
    if ptr.is_null() {
        return Err(fail(TactipStatus::Parameter, "path is null"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(fail(TactipStatus::Parameter, "path is not valid UTF-8")),
    }
}

/// Adaptive mean threshold. `out_bits` receives width*height bytes of
/// 0/1. `window` must be odd and fit inside the frame.
///
/// # Safety
/// `pixels` and `out_bits` must each point to width*height bytes.
#[no_mangle]
pub unsafe extern "C" fn tactip_threshold(
    pixels: *const u8,
    width: u32,
    height: u32,
    window: u32,
    offset: f64,
    out_bits: *mut u8,
) -> TactipStatus {
    if out_bits.is_null() {
        return fail(TactipStatus::Parameter, "out_bits is null");
    }
    let frame = match frame_from_raw(pixels, width, height) {
        Ok(f) => f,
        Err(s) => return s,
    };
    match adaptive_threshold(&frame, window, offset) {
        Ok(binary) => {
            std::slice::from_raw_parts_mut(out_bits, binary.bits.len())
                .copy_from_slice(&binary.bits);
            TactipStatus::Ok
        }
        Err(e) => fail_err(e),
    }
}

/// Clears connected foreground components larger than `max_area` pixels,
/// in place.
///
/// # Safety
/// `bits` must point to width*height bytes.
#[no_mangle]
pub unsafe extern "C" fn tactip_remove_large_blobs(
    bits: *mut u8,
    width: u32,
    height: u32,
    max_area: usize,
) -> TactipStatus {
    let frame = match binary_from_raw(bits, width, height) {
        Ok(f) => f,
        Err(s) => return s,
    };
    match remove_large_blobs(&frame, max_area) {
        Ok(cleaned) => {
            std::slice::from_raw_parts_mut(bits, cleaned.bits.len())
                .copy_from_slice(&cleaned.bits);
            TactipStatus::Ok
        }
        Err(e) => fail_err(e),
    }
}

/// Extracts blob centroids (area >= `min_area`) as x,y pairs.
/// `out_xy` holds up to `capacity` pairs; `out_count` receives how many
/// were written. Fails with `Data` if capacity is too small.
///
/// # Safety
/// `bits` must point to width*height bytes, `out_xy` to 2*capacity f64,
/// `out_count` to one usize.
#[no_mangle]
pub unsafe extern "C" fn tactip_centroids(
    bits: *const u8,
    width: u32,
    height: u32,
    min_area: usize,
    out_xy: *mut f64,
    capacity: usize,
    out_count: *mut usize,
) -> TactipStatus {
    if out_xy.is_null() || out_count.is_null() {
        return fail(TactipStatus::Parameter, "output pointer is null");
    }
    let frame = match binary_from_raw(bits, width, height) {
        Ok(f) => f,
        Err(s) => return s,
    };
    let markers = match extract_centroids(&frame, min_area) {
        Ok(m) => m,
        Err(e) => return fail_err(e),
    };
    if markers.points.len() > capacity {
        return fail(
            TactipStatus::Data,
            &format!("{} centroids exceed capacity {}", markers.points.len(), capacity),
        );
    }
    let out = std::slice::from_raw_parts_mut(out_xy, 2 * markers.points.len());
    for (i, &(x, y)) in markers.points.iter().enumerate() {
        out[2 * i] = x;
        out[2 * i + 1] = y;
    }
    *out_count = markers.points.len();
    TactipStatus::Ok
}

/// Opaque accumulating contact grid.
pub struct TactipForceGrid(ForceGrid);

/// Creates a grid over the reference frame. Returns null on failure
/// (see `tactip_last_error`).
///
/// # Safety
/// `pixels` must point to width*height bytes.
#[no_mangle]
pub unsafe extern "C" fn tactip_force_grid_new(
    pixels: *const u8,
    width: u32,
    height: u32,
    grid_size: u32,
    gamma: f64,
) -> *mut TactipForceGrid {
    let frame = match frame_from_raw(pixels, width, height) {
        Ok(f) => f,
        Err(_) => return std::ptr::null_mut(),
    };
    match ForceGrid::new(frame, grid_size, gamma) {
        Ok(grid) => Box::into_raw(Box::new(TactipForceGrid(grid))),
        Err(e) => {
            fail_err(e);
            std::ptr::null_mut()
        }
    }
}

/// Feeds the next frame into the grid.
///
/// # Safety
/// `grid` must come from `tactip_force_grid_new` and not be freed;
/// `pixels` must point to width*height bytes matching the grid's frame.
#[no_mangle]
pub unsafe extern "C" fn tactip_force_grid_update(
    grid: *mut TactipForceGrid,
    pixels: *const u8,
    width: u32,
    height: u32,
) -> TactipStatus {
    let Some(grid) = grid.as_mut() else {
        return fail(TactipStatus::Parameter, "grid is null");
    };
    let frame = match frame_from_raw(pixels, width, height) {
        Ok(f) => f,
        Err(s) => return s,
    };
    match grid.0.update(frame) {
        Ok(()) => TactipStatus::Ok,
        Err(e) => fail_err(e),
    }
}

/// Reads total activation and whether it crosses `threshold`.
///
/// # Safety
/// All pointers must be valid; `grid` must come from
/// `tactip_force_grid_new`.
#[no_mangle]
pub unsafe extern "C" fn tactip_force_grid_contact(
    grid: *const TactipForceGrid,
    threshold: f64,
    out_contact: *mut i32,
    out_total: *mut f64,
) -> TactipStatus {
    let Some(grid) = grid.as_ref() else {
        return fail(TactipStatus::Parameter, "grid is null");
    };
    if out_contact.is_null() || out_total.is_null() {
        return fail(TactipStatus::Parameter, "output pointer is null");
    }
    match grid.0.contact_detected(threshold) {
        Ok((contact, total)) => {
            *out_contact = contact as i32;
            *out_total = total;
            TactipStatus::Ok
        }
        Err(e) => fail_err(e),
    }
}

/// # Safety
/// `grid` must come from `tactip_force_grid_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tactip_force_grid_free(grid: *mut TactipForceGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Opaque fixed-count marker localizer.
pub struct TactipMarkerModel(RidgeMarkerModel);

/// Loads a trained marker model from disk; null on failure.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tactip_marker_model_load(path: *const c_char) -> *mut TactipMarkerModel {
    let path = match path_from_raw(path) {
        Ok(p) => p,
        Err(_) => return std::ptr::null_mut(),
    };
    match load_marker_model(path) {
        Ok(model) => Box::into_raw(Box::new(TactipMarkerModel(model))),
        Err(e) => {
            fail_err(e);
            std::ptr::null_mut()
        }
    }
}

/// Number of markers the model always reports.
///
/// # Safety
/// `model` must come from `tactip_marker_model_load`.
#[no_mangle]
pub unsafe extern "C" fn tactip_marker_model_count(model: *const TactipMarkerModel) -> usize {
    match model.as_ref() {
        Some(m) => m.0.marker_count,
        None => 0,
    }
}

/// Predicts all marker positions from a binary frame. `out_xy` must hold
/// 2 * marker_count doubles.
///
/// # Safety
/// `model` must come from `tactip_marker_model_load`; `bits` must point
/// to width*height bytes; `out_xy` to 2*marker_count f64.
#[no_mangle]
pub unsafe extern "C" fn tactip_marker_model_predict(
    model: *const TactipMarkerModel,
    bits: *const u8,
    width: u32,
    height: u32,
    out_xy: *mut f64,
) -> TactipStatus {
    let Some(model) = model.as_ref() else {
        return fail(TactipStatus::Parameter, "model is null");
    };
    if out_xy.is_null() {
        return fail(TactipStatus::Parameter, "out_xy is null");
    }
    let frame = match binary_from_raw(bits, width, height) {
        Ok(f) => f,
        Err(s) => return s,
    };
    let markers = predict_markers(&model.0, &frame);
    let out = std::slice::from_raw_parts_mut(out_xy, 2 * markers.points.len());
    for (i, &(x, y)) in markers.points.iter().enumerate() {
        out[2 * i] = x;
        out[2 * i + 1] = y;
    }
    TactipStatus::Ok
}

/// # Safety
/// `model` must come from `tactip_marker_model_load` and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn tactip_marker_model_free(model: *mut TactipMarkerModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs a stimulus script with the default sensor (glare spot included)
/// and writes the rendered frames to `out_path` as a frame container.
///
/// # Safety
/// Both paths must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn tactip_simulate_to_file(
    script_path: *const c_char,
    out_path: *const c_char,
    seed: u64,
) -> TactipStatus {
    let script_path = match path_from_raw(script_path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let out_path = match path_from_raw(out_path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let script = match StimulusScript::load(script_path) {
        Ok(s) => s,
        Err(e) => return fail_err(e),
    };
    let config = SensorConfig::default().with_glare();
    let (_, frames) = match run_script(&script, &config, seed, true) {
        Ok(r) => r,
        Err(e) => return fail_err(e),
    };
    match tactip_core::datasets::save_container(&frames, out_path) {
        Ok(()) => TactipStatus::Ok,
        Err(e) => fail_err(e),
    }
}
