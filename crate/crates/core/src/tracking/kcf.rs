//! Kernelized correlation filter over raw grayscale features, translation
//! only.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::imgproc::rgb_to_gray;
use crate::segmentation::HandRegion;
use crate::{Error, Image, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackConfig {
    /// Frames between scheduled re-initializations.
    pub reinit_interval: usize,
    pub padding: f64,
    pub kernel_sigma: f64,
    pub regularization: f64,
    pub model_learning_rate: f64,
    pub psr_floor: f64,
    /// Larger side of the filter patch; bigger search windows are sampled
    /// down to this.
    pub max_patch_side: usize,
    /// Width of the Gaussian regression target relative to the box size.
    pub output_sigma_factor: f64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            reinit_interval: 50,
            padding: 1.5,
            kernel_sigma: 0.5,
            regularization: 1e-4,
            model_learning_rate: 0.02,
            psr_floor: 5.0,
            max_patch_side: 128,
            output_sigma_factor: 0.1,
        }
    }
}

impl TrackConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("track.{m}")));
        if self.reinit_interval < 1 {
            return bad("reinit_interval must be at least 1");
        }
        if !(self.padding > 1.0) {
            return bad("padding must exceed 1");
        }
        if !(self.kernel_sigma > 0.0) {
            return bad("kernel_sigma must be positive");
        }
        if !(self.regularization > 0.0) {
            return bad("regularization must be positive");
        }
        if !(0.0..=1.0).contains(&self.model_learning_rate) {
            return bad("model_learning_rate must be in [0, 1]");
        }
        if !self.psr_floor.is_finite() {
            return bad("psr_floor must be finite");
        }
        if self.max_patch_side < 16 {
            return bad("max_patch_side must be at least 16");
        }
        if !(self.output_sigma_factor > 0.0) {
            return bad("output_sigma_factor must be positive");
        }
        Ok(())
    }
}

struct Fft2 {
    w: usize,
    h: usize,
    row: Arc<dyn Fft<f64>>,
    col: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(w: usize, h: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            w,
            h,
            row: p.plan_fft_forward(w),
            col: p.plan_fft_forward(h),
            row_inv: p.plan_fft_inverse(w),
            col_inv: p.plan_fft_inverse(h),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (row, col) = if inverse { (&self.row_inv, &self.col_inv) } else { (&self.row, &self.col) };
        row.process(data);
        let mut column = vec![Complex64::default(); self.h];
        for x in 0..self.w {
            for y in 0..self.h {
                column[y] = data[y * self.w + x];
            }
            col.process(&mut column);
            for y in 0..self.h {
                data[y * self.w + x] = column[y];
            }
        }
        if inverse {
            let n = (self.w * self.h) as f64;
            for v in data.iter_mut() {
                *v /= n;
            }
        }
    }

    fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut d, false);
        d
    }
}

/// Learned filter and its search geometry.
pub struct TrackerState {
    cfg: TrackConfig,
    fft: Fft2,
    window: Vec<f64>,
    label_f: Vec<Complex64>,
    /// Patch features the filter was trained on (spatial domain).
    model_x: Vec<f64>,
    model_alpha_f: Vec<Complex64>,
    /// Frame pixels per patch pixel.
    scale: f64,
    bbox: HandRegion,
    frames_since_init: usize,
    psr: f64,
}

impl std::fmt::Debug for TrackerState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrackerState")
            .field("bbox", &self.bbox)
            .field("patch", &(self.fft.w, self.fft.h))
            .field("scale", &self.scale)
            .field("frames_since_init", &self.frames_since_init)
            .field("psr", &self.psr)
            .finish()
    }
}

impl TrackerState {
    pub fn bbox(&self) -> HandRegion {
        self.bbox
    }

    pub fn frames_since_init(&self) -> usize {
        self.frames_since_init
    }

    /// Peak-to-sidelobe ratio of the last response map.
    pub fn psr(&self) -> f64 {
        self.psr
    }

    pub fn config(&self) -> &TrackConfig {
        &self.cfg
    }

    pub fn patch_size(&self) -> (usize, usize) {
        (self.fft.w, self.fft.h)
    }

    /// Features of the search window centered on `(cx, cy)`.
    fn features(&self, frame: &Image, cx: f64, cy: f64) -> Vec<f64> {
        let (w, h) = (self.fft.w, self.fft.h);
        let mut out = Vec::with_capacity(w * h);
        for j in 0..h {
            for i in 0..w {
                let fx = cx + (i as f64 + 0.5 - w as f64 / 2.0) * self.scale - 0.5;
                let fy = cy + (j as f64 + 0.5 - h as f64 / 2.0) * self.scale - 0.5;
                out.push(sample_gray(frame, fx, fy));
            }
        }
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        for (v, win) in out.iter_mut().zip(&self.window) {
            *v = (*v - mean) * win;
        }
        out
    }

    /// Gaussian kernel correlation of `x` with every cyclic shift of `z`, in
    /// the frequency domain.
    fn kernel_f(&self, x: &[f64], z: &[f64]) -> Vec<Complex64> {
        let n = x.len() as f64;
        let xf = self.fft.forward(x);
        let zf = self.fft.forward(z);
        let mut c: Vec<Complex64> = xf.iter().zip(&zf).map(|(a, b)| a * b.conj()).collect();
        self.fft.run(&mut c, true);
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let zz: f64 = z.iter().map(|v| v * v).sum();
        let s2 = self.cfg.kernel_sigma * self.cfg.kernel_sigma;
        let k: Vec<f64> = c
            .iter()
            .map(|v| (-((xx + zz - 2.0 * v.re).max(0.0) / n) / s2).exp())
            .collect();
        self.fft.forward(&k)
    }

    fn train(&self, x: &[f64]) -> Vec<Complex64> {
        let kf = self.kernel_f(x, x);
        self.label_f
            .iter()
            .zip(&kf)
            .map(|(y, k)| y / (k + self.cfg.regularization))
            .collect()
    }

    /// Response map of the current model over features `z`.
    fn response(&self, z: &[f64]) -> Vec<f64> {
        let kf = self.kernel_f(z, &self.model_x);
        let mut r: Vec<Complex64> = self.model_alpha_f.iter().zip(&kf).map(|(a, k)| a * k).collect();
        self.fft.run(&mut r, true);
        r.into_iter().map(|v| v.re).collect()
    }
}

fn sample_gray(frame: &Image, x: f64, y: f64) -> f64 {
    let (w, h) = frame.dims();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let (tx, ty) = (x - x0 as f64, y - y0 as f64);
    let g = |x: usize, y: usize| {
        let p = frame.pixel(x, y);
        if p.len() >= 3 {
            rgb_to_gray(p[0], p[1], p[2]) / 255.0
        } else {
            p[0] as f64 / 255.0
        }
    };
    let top = g(x0, y0) * (1.0 - tx) + g(x1, y0) * tx;
    let bottom = g(x0, y1) * (1.0 - tx) + g(x1, y1) * tx;
    top * (1.0 - ty) + bottom * ty
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Peak-to-sidelobe ratio with an 11×11 exclusion window around the peak.
pub fn peak_to_sidelobe(response: &[f64], w: usize, h: usize) -> (usize, f64) {
    let (peak_i, peak) = response
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let (px, py) = ((peak_i % w) as i64, (peak_i / w) as i64);
    let near = |x: usize, y: usize| {
        let dx = (x as i64 - px).rem_euclid(w as i64);
        let dy = (y as i64 - py).rem_euclid(h as i64);
        dx.min(w as i64 - dx) <= 5 && dy.min(h as i64 - dy) <= 5
    };
    let (mut n, mut sum, mut sum2) = (0usize, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            if !near(x, y) {
                let v = response[y * w + x];
                n += 1;
                sum += v;
                sum2 += v * v;
            }
        }
    }
    if n < 2 {
        return (peak_i, 0.0);
    }
    let mean = sum / n as f64;
    let sd = (sum2 / n as f64 - mean * mean).max(0.0).sqrt();
    let psr = if sd > 1e-12 { (peak - mean) / sd } else { 0.0 };
    (peak_i, psr)
}

/// Offset of a parabola's vertex through three samples, in [-0.5, 0.5].
fn parabolic(l: f64, c: f64, r: f64) -> f64 {
    let d = l - 2.0 * c + r;
    if d.abs() < 1e-12 {
        0.0
    } else {
        (0.5 * (l - r) / d).clamp(-0.5, 0.5)
    }
}

pub fn kcf_init(frame: &Image, bbox: HandRegion, cfg: &TrackConfig) -> Result<TrackerState> {
    cfg.validate()?;
    let (fw, fh) = frame.dims();
    if !bbox.is_inside(fw, fh) || bbox.w < 1.0 || bbox.h < 1.0 {
        return Err(Error::BoxOutOfFrame {
            x: bbox.x,
            y: bbox.y,
            w: bbox.w,
            h: bbox.h,
        });
    }
    let (sw, sh) = (bbox.w * cfg.padding, bbox.h * cfg.padding);
    let scale = (sw.max(sh) / cfg.max_patch_side as f64).max(1.0);
    let w = ((sw / scale).round() as usize).max(8);
    let h = ((sh / scale).round() as usize).max(8);
    let fft = Fft2::new(w, h);
    let wx = hann(w);
    let wy = hann(h);
    let window: Vec<f64> = wy.iter().flat_map(|b| wx.iter().map(move |a| a * b)).collect();
    let sigma = (bbox.w * bbox.h).sqrt() / scale * cfg.output_sigma_factor;
    let label: Vec<f64> = (0..h)
        .flat_map(|j| {
            let dy = if j <= h / 2 { j as f64 } else { j as f64 - h as f64 };
            (0..w).map(move |i| {
                let dx = if i <= w / 2 { i as f64 } else { i as f64 - w as f64 };
                (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
            })
        })
        .collect();
    let label_f = fft.forward(&label);
    let mut state = TrackerState {
        cfg: cfg.clone(),
        fft,
        window,
        label_f,
        model_x: Vec::new(),
        model_alpha_f: Vec::new(),
        scale,
        bbox,
        frames_since_init: 0,
        psr: f64::INFINITY,
    };
    let (cx, cy) = bbox.center();
    let x = state.features(frame, cx, cy);
    state.model_alpha_f = state.train(&x);
    state.model_x = x;
    Ok(state)
}

/// Moves the box to the response peak and blends the model. A response
/// whose PSR falls below the floor leaves box and model untouched and
/// reports [`Error::LowConfidence`].
pub fn kcf_update(state: &mut TrackerState, frame: &Image) -> Result<HandRegion> {
    let (cx, cy) = state.bbox.center();
    let z = state.features(frame, cx, cy);
    let resp = state.response(&z);
    let (w, h) = (state.fft.w, state.fft.h);
    let (peak, psr) = peak_to_sidelobe(&resp, w, h);
    state.psr = psr;
    state.frames_since_init += 1;
    if !(psr >= state.cfg.psr_floor) {
        return Err(Error::LowConfidence { psr });
    }
    let (px, py) = (peak % w, peak / w);
    let at = |x: usize, y: usize| resp[(y % h) * w + (x % w)];
    let sx = parabolic(at(px + w - 1, py), at(px, py), at(px + 1, py));
    let sy = parabolic(at(px, py + h - 1), at(px, py), at(px, py + 1));
    let wrap = |p: usize, n: usize| if p > n / 2 { p as f64 - n as f64 } else { p as f64 };
    let dx = (wrap(px, w) + sx) * state.scale;
    let dy = (wrap(py, h) + sy) * state.scale;
    let (fw, fh) = frame.dims();
    let b = state.bbox;
    let nx = (b.x + dx).clamp(0.0, (fw as f64 - b.w).max(0.0));
    let ny = (b.y + dy).clamp(0.0, (fh as f64 - b.h).max(0.0));
    state.bbox = HandRegion { x: nx, y: ny, ..b };
    let (ncx, ncy) = state.bbox.center();
    let x = state.features(frame, ncx, ncy);
    let alpha_f = state.train(&x);
    let eta = state.cfg.model_learning_rate;
    for (m, v) in state.model_x.iter_mut().zip(&x) {
        *m = (1.0 - eta) * *m + eta * v;
    }
    for (m, v) in state.model_alpha_f.iter_mut().zip(&alpha_f) {
        *m = (1.0 - eta) * *m + eta * v;
    }
    Ok(state.bbox)
}
