//! Adaptive per-pixel Gaussian mixture background model with automatic
//! component selection (Zivkovic).

use serde::{Deserialize, Serialize};

use crate::{par, BinaryMask, Error, Image, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmConfig {
    pub max_components: usize,
    pub learning_rate: f64,
    /// Match distance in standard deviations.
    pub variance_threshold: f64,
    pub initial_variance: f64,
    pub min_variance: f64,
    pub max_variance: f64,
    /// Cumulative weight treated as background (`1 - c_f`).
    pub background_ratio: f64,
    /// Complexity reduction prior `c_T`.
    pub complexity_prior: f64,
    /// Frames after construction during which every pixel reports foreground.
    pub warmup_frames: usize,
}

impl Default for GmmConfig {
    fn default() -> Self {
        Self {
            max_components: 5,
            learning_rate: 0.005,
            variance_threshold: 2.5,
            initial_variance: 15.0 * 15.0,
            min_variance: 4.0,
            max_variance: 5.0 * 15.0 * 15.0,
            background_ratio: 0.9,
            complexity_prior: 0.05,
            warmup_frames: 10,
        }
    }
}

impl GmmConfig {
    pub const MAX_COMPONENTS: usize = 8;

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.max_components == 0 || self.max_components > Self::MAX_COMPONENTS {
            return bad("gmm max_components must be in 1..=8");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("gmm learning_rate must be in (0, 1]");
        }
        if !(self.variance_threshold > 0.0) {
            return bad("gmm variance_threshold must be positive");
        }
        if !(self.min_variance > 0.0 && self.min_variance <= self.initial_variance && self.initial_variance <= self.max_variance) {
            return bad("gmm variances must satisfy 0 < min <= initial <= max");
        }
        if !(self.background_ratio > 0.0 && self.background_ratio <= 1.0) {
            return bad("gmm background_ratio must be in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.complexity_prior) {
            return bad("gmm complexity_prior must be in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Mode {
    weight: f32,
    var: f32,
    mean: [f32; 3],
}

#[derive(Debug, Clone, Copy, Default)]
struct PixelModel {
    n: u8,
    modes: [Mode; GmmConfig::MAX_COMPONENTS],
}

/// Precomputed `f32` parameters for the per-pixel kernel.
#[derive(Clone, Copy)]
struct Kernel {
    max: usize,
    alpha: f32,
    t2: f32,
    var0: f32,
    var_min: f32,
    var_max: f32,
    bg: f32,
    prune: f32,
}

impl Kernel {
    fn from(c: &GmmConfig) -> Self {
        Self {
            max: c.max_components,
            alpha: c.learning_rate as f32,
            t2: (c.variance_threshold * c.variance_threshold) as f32,
            var0: c.initial_variance as f32,
            var_min: c.min_variance as f32,
            var_max: c.max_variance as f32,
            bg: c.background_ratio as f32,
            prune: (c.learning_rate * c.complexity_prior) as f32,
        }
    }

    /// Background test against the current mixture, no update.
    fn classify(&self, p: &PixelModel, x: [f32; 3]) -> bool {
        let mut cum = 0.0f32;
        for m in &p.modes[..p.n as usize] {
            if cum >= self.bg {
                break;
            }
            if dist2(m, x) < self.t2 * m.var {
                return true;
            }
            cum += m.weight;
        }
        false
    }

    /// Updates the mixture with sample `x`; returns whether it matched a
    /// background component.
    fn update(&self, p: &mut PixelModel, x: [f32; 3]) -> bool {
        let n = p.n as usize;
        let mut matched = None;
        let mut background = false;
        let mut cum = 0.0f32;
        let mut kept = 0usize;
        for i in 0..n {
            let mut m = p.modes[i];
            let w_before = m.weight;
            if matched.is_none() {
                let d2 = dist2(&m, x);
                if d2 < self.t2 * m.var {
                    matched = Some(kept);
                    background = cum < self.bg;
                    m.weight += self.alpha * (1.0 - m.weight) - self.prune;
                    let rho = self.alpha / m.weight.max(self.alpha);
                    for (mc, xc) in m.mean.iter_mut().zip(x) {
                        *mc += rho * (xc - *mc);
                    }
                    m.var = (m.var + rho * (d2 / 3.0 - m.var)).clamp(self.var_min, self.var_max);
                } else {
                    m.weight += -self.alpha * m.weight - self.prune;
                }
            } else {
                m.weight += -self.alpha * m.weight - self.prune;
            }
            cum += w_before;
            if m.weight > 0.0 {
                p.modes[kept] = m;
                kept += 1;
            } else if matched == Some(kept) {
                matched = None;
            }
        }
        if matched.is_none() {
            let slot = if kept < self.max { kept } else { self.max - 1 };
            p.modes[slot] = Mode {
                weight: if kept == 0 { 1.0 } else { self.alpha },
                var: self.var0,
                mean: x,
            };
            kept = slot + 1;
        }
        p.n = kept as u8;
        let total: f32 = p.modes[..kept].iter().map(|m| m.weight).sum();
        for m in &mut p.modes[..kept] {
            m.weight /= total;
        }
        // Keep modes sorted by weight, descending; at most one entry moved.
        for i in 1..kept {
            let mut j = i;
            while j > 0 && p.modes[j].weight > p.modes[j - 1].weight {
                p.modes.swap(j, j - 1);
                j -= 1;
            }
        }
        background
    }
}

#[inline]
fn dist2(m: &Mode, x: [f32; 3]) -> f32 {
    let d0 = x[0] - m.mean[0];
    let d1 = x[1] - m.mean[1];
    let d2 = x[2] - m.mean[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Per-pixel mixture state for one camera stream.
#[derive(Debug, Clone)]
pub struct GmmBackgroundModel {
    config: GmmConfig,
    width: usize,
    height: usize,
    pixels: Vec<PixelModel>,
    frames_seen: usize,
}

impl GmmBackgroundModel {
    pub fn new(width: usize, height: usize, config: GmmConfig) -> Self {
        Self {
            config,
            width,
            height,
            pixels: vec![PixelModel::default(); width * height],
            frames_seen: 0,
        }
    }

    pub fn config(&self) -> &GmmConfig {
        &self.config
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn is_warm(&self) -> bool {
        self.frames_seen > self.config.warmup_frames
    }

    /// Component weights of one pixel, heaviest first.
    pub fn weights(&self, x: usize, y: usize) -> Vec<f64> {
        let p = &self.pixels[y * self.width + x];
        p.modes[..p.n as usize].iter().map(|m| m.weight as f64).collect()
    }

    /// Component variances of one pixel, heaviest component first.
    pub fn variances(&self, x: usize, y: usize) -> Vec<f64> {
        let p = &self.pixels[y * self.width + x];
        p.modes[..p.n as usize].iter().map(|m| m.var as f64).collect()
    }

    /// Updates every pixel with `frame` and returns the foreground mask.
    pub fn update(&mut self, frame: &Image) -> Result<BinaryMask> {
        self.update_selective(frame, None)
    }

    /// Like [`update`](Self::update), but pixels set in `exclude` are only
    /// classified, leaving their mixtures untouched.
    pub fn update_selective(&mut self, frame: &Image, exclude: Option<&BinaryMask>) -> Result<BinaryMask> {
        let (w, h) = (self.width, self.height);
        if frame.dims() != (w, h) || frame.channels() != 3 {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                actual: frame.dims(),
            });
        }
        if let Some(ex) = exclude {
            if ex.dims() != (w, h) {
                return Err(Error::DimensionMismatch {
                    expected: (w, h),
                    actual: ex.dims(),
                });
            }
        }
        let kernel = Kernel::from(&self.config);
        let src = frame.data();
        let ex_bits = exclude.map(|m| m.bits());
        let mut fg = vec![false; w * h];
        par::for_each_row_pair_mut(&mut self.pixels, w, &mut fg, w, |y, models, out| {
            let line = &src[y * w * 3..(y + 1) * w * 3];
            let ex_row = ex_bits.map(|b| &b[y * w..(y + 1) * w]);
            for (x, (p, o)) in models.iter_mut().zip(out.iter_mut()).enumerate() {
                let s = [line[3 * x] as f32, line[3 * x + 1] as f32, line[3 * x + 2] as f32];
                let skip = ex_row.is_some_and(|r| r[x]);
                *o = !if skip { kernel.classify(p, s) } else { kernel.update(p, s) };
            }
        });
        self.frames_seen += 1;
        if self.frames_seen <= self.config.warmup_frames {
            return Ok(BinaryMask::filled(w, h, true));
        }
        BinaryMask::from_bits(w, h, fg)
    }
}

/// Updates `model` with `frame` and returns the foreground mask.
pub fn gmm_update(model: &mut GmmBackgroundModel, frame: &Image) -> Result<BinaryMask> {
    model.update(frame)
}
