//! Air-writing recognition engine.
//!
//! The pipeline runs per video frame: a hand region is acquired (annotation
//! or skin-blob provider) and followed with a correlation-filter tracker, the
//! hand is segmented inside that region, a writing pose is recognized by
//! counting raised fingers, and the fingertip is located as the maximum of a
//! distance-weighted curvature-entropy signature over the hand contour.
//! Fingertip positions accumulate into a trajectory that is delimited by a
//! velocity threshold, smoothed, rasterized, and classified.
//!
//! Pixel kernels are data-parallel over rows when the `parallel` feature is
//! enabled (the default) and fall back to plain iteration otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod eval;
pub mod fingertip;
pub mod handpose;
pub mod imgproc;
pub mod par;
pub mod recognition;
pub mod segmentation;
pub mod tracking;
pub mod trajectory;

pub use error::{Error, Result};
pub use imgproc::{BinaryMask, Contour, FloatField, Image, MorphKernel, Point};
