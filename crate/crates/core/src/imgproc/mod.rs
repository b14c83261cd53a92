//! Pixel kernels over 8-bit rasters and boolean masks.
//!
//! Conventions used throughout: foreground is 8-connected, background is
//! 4-connected, and coordinates are `(x, y)` with `y` growing downward.

mod color;
mod components;
mod contour;
mod distance;
mod moments;
mod morph;
pub mod pnm;

pub use color::{rgb_to_gray, rgb_to_ycbcr, to_grayscale};
pub use components::{components, largest_component, Component};
pub use contour::{resample_contour, trace_contour};
pub use distance::distance_transform;
pub use moments::moments_centroid;
pub use morph::{dilate, erode, morph_filter};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn rounded(self) -> (i64, i64) {
        (self.x.round() as i64, self.y.round() as i64)
    }

    pub fn round(self) -> Point {
        Point::new(self.x.round(), self.y.round())
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Row-major 8-bit raster with one (grayscale) or three (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        assert!(width >= 1 && height >= 1, "image must be at least 1x1");
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        Self {
            width,
            height,
            channels,
            data: vec![0; width * height * channels],
        }
    }

    pub fn from_raw(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("image must be at least 1x1".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParameter(format!("unsupported channel count {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidParameter(format!(
                "data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// RGB image filled with one color.
    pub fn filled_rgb(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let mut img = Self::new(width, height, 3);
        for px in img.data.chunks_exact_mut(3) {
            px.copy_from_slice(&rgb);
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    /// Copies the `w`×`h` window at `(x, y)`; the window must lie inside.
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Image> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop ({x}, {y}, {w}, {h}) outside {}x{}",
                self.width, self.height
            )));
        }
        let c = self.channels;
        let mut data = Vec::with_capacity(w * h * c);
        for row in y..y + h {
            let start = (row * self.width + x) * c;
            data.extend_from_slice(&self.data[start..start + w * c]);
        }
        Image::from_raw(w, h, c, data)
    }
}

/// Row-major boolean raster; `true` is foreground.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.width, self.height)?;
        if self.width * self.height <= 64 * 64 {
            for row in self.bits.chunks(self.width) {
                let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask must be at least 1x1");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        let mut m = Self::new(width, height);
        m.bits.fill(value);
        m
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} bits do not form a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y);
            }
        }
        m
    }

    /// Parses rows of `#` (foreground) and `.` (background).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        Self::from_fn(width, height, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-raster coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Inclusive pixel bounds `(x0, y0, x1, y1)` of the foreground.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.foreground() {
            bb = Some(match bb {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bb
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn not(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// True when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Result<BinaryMask> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<BinaryMask> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop ({x}, {y}, {w}, {h}) outside {}x{}",
                self.width, self.height
            )));
        }
        let mut bits = Vec::with_capacity(w * h);
        for row in y..y + h {
            let start = row * self.width + x;
            bits.extend_from_slice(&self.bits[start..start + w]);
        }
        BinaryMask::from_bits(w, h, bits)
    }

    /// Shifts the foreground by `(dx, dy)` on a canvas of the same size;
    /// pixels shifted out are dropped.
    pub fn translated(&self, dx: i64, dy: i64) -> BinaryMask {
        let mut out = BinaryMask::new(self.width, self.height);
        for (x, y) in self.foreground() {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                out.set(nx as usize, ny as usize, true);
            }
        }
        out
    }

    /// Rotates by 90° clockwise: `(x, y)` maps to `(height - 1 - y, x)`.
    pub fn rotated_cw(&self) -> BinaryMask {
        let (w, h) = self.dims();
        let mut out = BinaryMask::new(h, w);
        for (x, y) in self.foreground() {
            out.set(h - 1 - y, x, true);
        }
        out
    }

    /// 8-bit rendering with 0 = background and 255 = foreground.
    pub fn to_image(&self) -> Image {
        let data = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        Image::from_raw(self.width, self.height, 1, data).expect("dimensions are consistent")
    }

    /// Any nonzero sample is foreground.
    pub fn from_image(img: &Image) -> BinaryMask {
        let c = img.channels();
        let bits = img.data().chunks_exact(c).map(|px| px.iter().any(|&v| v != 0)).collect();
        BinaryMask::from_bits(img.width(), img.height(), bits).expect("dimensions are consistent")
    }
}

/// Circular (disk) structuring element anchored at its center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphKernel {
    pub radius: usize,
}

impl Default for MorphKernel {
    fn default() -> Self {
        Self { radius: 3 }
    }
}

impl MorphKernel {
    pub fn disk(radius: usize) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidParameter("kernel radius must be >= 1".into()));
        }
        Ok(Self { radius })
    }

    /// Horizontal half-extent of the disk on each row offset `-r..=r`.
    pub fn row_extents(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        (-r..=r)
            .map(|dy| {
                let half = ((r * r - dy * dy) as f64).sqrt().floor() as i64;
                (dy, half)
            })
            .collect()
    }

    /// All `(dx, dy)` offsets with `dx² + dy² ≤ r²`.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        self.row_extents()
            .into_iter()
            .flat_map(|(dy, half)| (-half..=half).map(move |dx| (dx, dy)))
            .collect()
    }
}

/// Row-major nonnegative real field, e.g. a distance transform.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl FloatField {
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height);
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Position of the maximum; ties go to the smallest row-major index.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }
}

/// Ordered boundary points; `closed` joins the last point back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length, including the closing segment when closed.
    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return 0.0;
        }
        let open: f64 = self.points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if self.closed {
            open + self.points[n - 1].distance(self.points[0])
        } else {
            open
        }
    }
}
