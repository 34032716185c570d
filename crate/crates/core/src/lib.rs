//! Optical tactile sensing pipeline.
//!
//! Stages mirror the processing chain of a marker-based optical tactile
//! sensor: adaptive thresholding and blob handling (`imagery`),
//! receptive-field contact detection (`contact`), marker correspondence
//! and the fixed-count ridge localizer (`tracking`), pressure regression
//! (`pressure`), temporal surface classification (`classify`). The
//! `simulator` module replaces the physical data-collection rig and
//! supplies ground truth; `datasets` handles containers, manifests and
//! leakage-free splits.

pub mod classify;
pub mod contact;
pub mod datasets;
pub mod error;
pub mod imagery;
pub mod plot;
pub mod pressure;
pub mod simulator;
pub mod tracking;

pub use error::{Error, Result};
