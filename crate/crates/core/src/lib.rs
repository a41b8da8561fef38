//! Reconstruction of tilings by horizontal and vertical bars from their row
//! and column projections.
//!
//! * [`grid`]: geometry, regions, bars, tilings, validation.
//! * [`uniform`]: uniform constraints on tori and rectangles.
//! * [`greedy`]: unit horizontal bars on histograms, and the block-uniform
//!   reduction to it.
//! * [`separation`]: realization-independent cuts and necessary conditions.
//! * [`exact`]: exhaustive search used as ground truth.
//! * [`hardness`]: the four-tiling gadget and the reduction from 3-color
//!   consistency.
//! * [`bench`]: timing of the histogram greedy.
//! * [`format`]: instance, tiling, gadget and 3-color file formats and
//!   rendering.

pub mod bench;
pub mod error;
pub mod exact;
pub mod format;
pub mod greedy;
pub mod grid;
pub mod hardness;
pub mod separation;
pub mod uniform;

pub use error::{Error, Result};
pub use grid::{
    projections_of, row_counts, validate_tiling, Bar, BarSpec, Cell, Geometry, Instance, Orientation,
    ProjectionPair, Region, Shape, Tiling, ValidationReport, Violation,
};
