//! Hand mask extraction inside a candidate hand box: static YCbCr skin
//! filter, adaptive GMM foreground, logical AND, morphology, and largest
//! connected component.

mod gmm;

pub use gmm::{gmm_update, GmmBackgroundModel, GmmConfig};

use serde::{Deserialize, Serialize};

use crate::imgproc::{largest_component, morph_filter};
use crate::{par, BinaryMask, Error, Image, MorphKernel, Result};

/// Inclusive Cb/Cr band of the static skin model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkinModel {
    pub cb_min: u8,
    pub cb_max: u8,
    pub cr_min: u8,
    pub cr_max: u8,
}

impl Default for SkinModel {
    fn default() -> Self {
        Self {
            cb_min: 77,
            cb_max: 127,
            cr_min: 133,
            cr_max: 173,
        }
    }
}

impl SkinModel {
    pub fn validate(&self) -> Result<()> {
        if self.cb_min > self.cb_max || self.cr_min > self.cr_max {
            return Err(Error::InvalidParameter(format!("inverted skin band {self:?}")));
        }
        Ok(())
    }

    /// Band test on the chroma of [`rgb_to_ycbcr`](crate::imgproc::rgb_to_ycbcr), evaluated in exact
    /// fixed point (the coefficients have four decimals).
    #[inline]
    pub fn is_skin(&self, r: u8, g: u8, b: u8) -> bool {
        let (r, g, b) = (r as i32, g as i32, b as i32);
        let cb = -1687 * r - 3313 * g + 5000 * b + 1_280_000;
        let cr = 5000 * r - 4187 * g - 813 * b + 1_280_000;
        let band = |v: i32, lo: u8, hi: u8| lo as i32 * 10_000 <= v && v <= hi as i32 * 10_000;
        band(cb, self.cb_min, self.cb_max) && band(cr, self.cr_min, self.cr_max)
    }
}

/// Per-pixel skin classification of an RGB raster.
pub fn skin_mask(roi: &Image, model: &SkinModel) -> Result<BinaryMask> {
    if roi.channels() != 3 {
        return Err(Error::InvalidParameter("skin_mask needs an RGB image".into()));
    }
    let (w, h) = roi.dims();
    let src = roi.data();
    let mut bits = vec![false; w * h];
    par::for_each_row_mut(&mut bits, w, |y, row| {
        let line = &src[y * w * 3..(y + 1) * w * 3];
        for (dst, px) in row.iter_mut().zip(line.chunks_exact(3)) {
            *dst = model.is_skin(px[0], px[1], px[2]);
        }
    });
    BinaryMask::from_bits(w, h, bits)
}

/// Candidate hand bounding box in frame pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandRegion {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    #[serde(default = "full_confidence")]
    pub confidence: f64,
}

fn full_confidence() -> f64 {
    1.0
}

impl HandRegion {
    pub const MIN_SIDE: f64 = 8.0;

    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self {
            x,
            y,
            w,
            h,
            confidence: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        self.w.max(0.0) * self.h.max(0.0)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }

    /// Scales width and height by `factor` about the center.
    pub fn grown(&self, factor: f64) -> Self {
        let (cx, cy) = self.center();
        let (w, h) = (self.w * factor, self.h * factor);
        Self {
            x: cx - w / 2.0,
            y: cy - h / 2.0,
            w,
            h,
            confidence: self.confidence,
        }
    }

    pub fn is_inside(&self, width: usize, height: usize) -> bool {
        const EPS: f64 = 1e-9;
        self.x >= -EPS
            && self.y >= -EPS
            && self.x + self.w <= width as f64 + EPS
            && self.y + self.h <= height as f64 + EPS
            && self.w > 0.0
            && self.h > 0.0
    }

    /// Intersects with the frame and enforces the minimum side where the
    /// frame allows it. `None` when nothing of the box is inside.
    pub fn clamped(&self, width: usize, height: usize) -> Option<Self> {
        let (fw, fh) = (width as f64, height as f64);
        let mut x0 = self.x.max(0.0);
        let mut y0 = self.y.max(0.0);
        let mut x1 = (self.x + self.w).min(fw);
        let mut y1 = (self.y + self.h).min(fh);
        if x1 <= x0 || y1 <= y0 {
            return None;
        }
        let min_w = Self::MIN_SIDE.min(fw);
        let min_h = Self::MIN_SIDE.min(fh);
        if x1 - x0 < min_w {
            let cx = (x0 + x1) / 2.0;
            x0 = (cx - min_w / 2.0).clamp(0.0, fw - min_w);
            x1 = x0 + min_w;
        }
        if y1 - y0 < min_h {
            let cy = (y0 + y1) / 2.0;
            y0 = (cy - min_h / 2.0).clamp(0.0, fh - min_h);
            y1 = y0 + min_h;
        }
        Some(Self {
            x: x0,
            y: y0,
            w: x1 - x0,
            h: y1 - y0,
            confidence: self.confidence,
        })
    }

    /// Integer pixel window `(x, y, w, h)` covering the box, inside the frame.
    pub fn pixel_rect(&self, width: usize, height: usize) -> Option<(usize, usize, usize, usize)> {
        let c = self.clamped(width, height)?;
        let x0 = c.x.round().max(0.0) as usize;
        let y0 = c.y.round().max(0.0) as usize;
        let x1 = ((c.x + c.w).round() as usize).min(width);
        let y1 = ((c.y + c.h).round() as usize).min(height);
        (x1 > x0 && y1 > y0).then(|| (x0, y0, x1 - x0, y1 - y0))
    }
}

/// Fuses skin and foreground masks, cleans with morphology, and keeps the
/// largest component.
pub fn segment_hand(roi: &Image, skin: &SkinModel, fg: &BinaryMask, k: MorphKernel) -> Result<BinaryMask> {
    if fg.dims() != roi.dims() {
        return Err(Error::DimensionMismatch {
            expected: roi.dims(),
            actual: fg.dims(),
        });
    }
    let fused = skin_mask(roi, skin)?.and(fg)?;
    if fused.is_empty() {
        return Err(Error::EmptyMask);
    }
    largest_component(&morph_filter(&fused, k))
}
