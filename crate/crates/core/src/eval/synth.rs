//! Seeded synthetic hands and frame sequences with exact ground truth.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::imgproc::pnm;
use crate::recognition::{glyph_path, CharClass};
use crate::segmentation::HandRegion;
use crate::{BinaryMask, Error, Image, Point, Result};

/// Rendering color of synthetic skin, inside the default skin band.
pub const SKIN_RGB: [u8; 3] = [200, 140, 120];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerSpec {
    /// Degrees counterclockwise from the +x axis; 90 points up.
    pub angle: f64,
    /// Palm center to the apex of the rounded tip, px.
    pub length: f64,
    pub width: f64,
}

impl FingerSpec {
    fn dir(&self) -> Point {
        let a = self.angle.to_radians();
        Point::new(a.cos(), -a.sin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthHandSpec {
    pub width: usize,
    pub height: usize,
    pub palm_center: Point,
    pub palm_radius: f64,
    pub fingers: Vec<FingerSpec>,
    /// Width of the wrist stem that runs straight down to the bottom border.
    pub stem_width: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandTruth {
    pub centroid: Point,
    pub tips: Vec<Point>,
    pub finger_count: usize,
}

impl SynthHandSpec {
    /// A random hand with `fingers` raised fingers on a 256×224 canvas.
    /// One finger points within 50° of vertical; several fingers are spread
    /// 34–42° apart in a fan whose middle is within 20° of vertical.
    pub fn random(fingers: usize, seed: u64) -> Result<Self> {
        if fingers > 5 {
            return Err(Error::SpecOutOfBounds(format!("{fingers} fingers")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (width, height) = (256, 224);
        let r = rng.gen_range(24.0..32.0);
        let cx = width as f64 / 2.0 + rng.gen_range(-10.0..10.0);
        let cy = height as f64 - r * rng.gen_range(1.75..2.0);
        let angles: Vec<f64> = match fingers {
            0 => vec![],
            1 => vec![90.0 + rng.gen_range(-50.0..50.0)],
            n => {
                let gaps: Vec<f64> = (1..n).map(|_| rng.gen_range(34.0..42.0)).collect();
                let span: f64 = gaps.iter().sum();
                let mid = 90.0 + rng.gen_range(-20.0..20.0);
                let first = (mid - span / 2.0).clamp(5.0, 175.0 - span);
                let mut a = vec![first];
                for g in gaps {
                    a.push(a.last().unwrap() + g);
                }
                a
            }
        };
        let fingers = angles
            .into_iter()
            .map(|angle| FingerSpec {
                angle,
                length: r * rng.gen_range(2.8..3.2),
                width: rng.gen_range(6.0..8.0),
            })
            .collect();
        Ok(Self {
            width,
            height,
            palm_center: Point::new(cx, cy),
            palm_radius: r,
            fingers,
            stem_width: r * rng.gen_range(0.9..1.1),
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::SpecOutOfBounds(m));
        let (w, h) = (self.width as f64, self.height as f64);
        let c = self.palm_center;
        let r = self.palm_radius;
        if self.width == 0 || self.height == 0 || !(r >= 3.0) {
            return bad(format!("canvas {}x{} palm radius {r}", self.width, self.height));
        }
        if c.x - r < 0.0 || c.y - r < 0.0 || c.x + r > w - 1.0 || c.y + r > h - 1.0 {
            return bad(format!("palm at ({}, {}) r {r} leaves the canvas", c.x, c.y));
        }
        if self.fingers.len() > 5 {
            return bad(format!("{} fingers", self.fingers.len()));
        }
        if !(self.stem_width > 0.0 && self.stem_width <= 2.0 * r) {
            return bad(format!("stem width {}", self.stem_width));
        }
        for f in &self.fingers {
            if !(f.width >= 6.0) {
                return bad(format!("finger width {} < 6", f.width));
            }
            if !(f.length >= 2.5 * r) {
                return bad(format!("finger length {} < 2.5 palm radii", f.length));
            }
            let tip = c + f.dir() * f.length;
            let m = f.width / 2.0 + 1.0;
            if tip.x < m || tip.y < m || tip.x > w - 1.0 - m || tip.y > h - 1.0 - m {
                return bad(format!("finger at {}° leaves the canvas", f.angle));
            }
        }
        Ok(())
    }

    pub fn tips(&self) -> Vec<Point> {
        self.fingers
            .iter()
            .map(|f| self.palm_center + f.dir() * f.length)
            .collect()
    }
}

fn paint_disk(m: &mut BinaryMask, c: Point, r: f64) {
    paint_capsule(m, c, c, r);
}

/// Points within `hw` of segment `a`–`b`.
fn paint_capsule(m: &mut BinaryMask, a: Point, b: Point, hw: f64) {
    let (w, h) = m.dims();
    let x0 = (a.x.min(b.x) - hw).floor().max(0.0) as usize;
    let y0 = (a.y.min(b.y) - hw).floor().max(0.0) as usize;
    let x1 = ((a.x.max(b.x) + hw).ceil().max(0.0) as usize).min(w.saturating_sub(1));
    let y1 = ((a.y.max(b.y) + hw).ceil().max(0.0) as usize).min(h.saturating_sub(1));
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = Point::new(x as f64, y as f64) - a;
            let t = if len2 > 0.0 {
                ((p.x * ab.x + p.y * ab.y) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            if (p.x - t * ab.x).hypot(p.y - t * ab.y) <= hw {
                m.set(x, y, true);
            }
        }
    }
}

/// Palm disk, capsule fingers and a wrist stem. Each finger's truth tip is
/// the apex of its rounded end.
pub fn synth_hand(spec: &SynthHandSpec) -> Result<(BinaryMask, HandTruth)> {
    spec.validate()?;
    let mut m = BinaryMask::new(spec.width, spec.height);
    let c = spec.palm_center;
    paint_disk(&mut m, c, spec.palm_radius);
    let half = spec.stem_width / 2.0;
    let x0 = (c.x - half).ceil().max(0.0) as usize;
    let x1 = ((c.x + half).floor() as usize).min(spec.width - 1);
    for y in c.y.ceil() as usize..spec.height {
        for x in x0..=x1 {
            m.set(x, y, true);
        }
    }
    for f in &spec.fingers {
        let hw = f.width / 2.0;
        paint_capsule(&mut m, c, c + f.dir() * (f.length - hw), hw);
    }
    let truth = HandTruth {
        centroid: c,
        tips: spec.tips(),
        finger_count: spec.fingers.len(),
    };
    Ok((m, truth))
}

/// `n` points spaced evenly by arc length along the glyph path of `label`,
/// scaled by `scale` px and placed with its unit box at `origin`.
pub fn sample_glyph_path(label: CharClass, origin: Point, scale: f64, n: usize) -> Vec<Point> {
    let path: Vec<Point> = glyph_path(label).iter().map(|&p| origin + p * scale).collect();
    sample_polyline(&path, n)
}

pub(crate) fn sample_polyline(path: &[Point], n: usize) -> Vec<Point> {
    if n == 0 || path.is_empty() {
        return Vec::new();
    }
    let cum: Vec<f64> = std::iter::once(0.0)
        .chain(path.windows(2).scan(0.0, |acc, w| {
            *acc += w[0].distance(w[1]);
            Some(*acc)
        }))
        .collect();
    let total = *cum.last().unwrap();
    if n == 1 || total == 0.0 {
        return vec![path[0]; n];
    }
    let mut seg = 0;
    (0..n)
        .map(|i| {
            let s = total * i as f64 / (n - 1) as f64;
            while seg + 2 < cum.len() && cum[seg + 1] < s {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
            path[seg] + (path[seg + 1] - path[seg]) * t
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Motion {
    /// Constant translation per frame.
    Constant { dx: f64, dy: f64 },
    /// The hand is moved so that its first fingertip (or palm center if it
    /// has none) visits these frame positions in turn; one per frame.
    Path { points: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub width: usize,
    pub height: usize,
    /// Hand sprite; its canvas bottom is the wrist line.
    pub hand: SynthHandSpec,
    /// Frame position of the sprite's top-left corner at frame 0.
    pub origin: Point,
    pub motion: Motion,
    pub frames: usize,
    #[serde(default = "default_background")]
    pub background: [u8; 3],
    /// Amplitude of uniform per-pixel noise on every frame.
    #[serde(default)]
    pub noise: u8,
    #[serde(default)]
    pub seed: u64,
}

fn default_background() -> [u8; 3] {
    [60, 80, 110]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub frame: usize,
    #[serde(rename = "box")]
    pub bbox: HandRegion,
    pub tip: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceTruth {
    pub frames: Vec<FrameTruth>,
}

impl SequenceTruth {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn boxes(&self) -> Vec<HandRegion> {
        self.frames.iter().map(|f| f.bbox).collect()
    }

    pub fn tips(&self) -> Vec<Option<Point>> {
        self.frames.iter().map(|f| f.tip).collect()
    }
}

/// A rendered synthetic sequence. Frames are produced on demand.
#[derive(Debug, Clone)]
pub struct SyntheticSequence {
    spec: SequenceSpec,
    sprite: BinaryMask,
    sprite_box: (usize, usize, usize, usize),
    tip: Option<Point>,
    offsets: Vec<Point>,
}

impl SyntheticSequence {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        let (sprite, truth) = synth_hand(&spec.hand)?;
        let (x0, y0, x1, y1) = sprite.bounding_box().ok_or(Error::EmptyMask)?;
        let sprite_box = (x0, y0, x1 - x0 + 1, y1 - y0 + 1);
        let anchor = truth.tips.first().copied().unwrap_or(truth.centroid);
        let offsets: Vec<Point> = match &spec.motion {
            Motion::Constant { dx, dy } => (0..spec.frames)
                .map(|i| Point::new(dx * i as f64, dy * i as f64))
                .collect(),
            Motion::Path { points } => {
                if points.len() != spec.frames {
                    return Err(Error::SpecOutOfBounds(format!(
                        "path has {} points for {} frames",
                        points.len(),
                        spec.frames
                    )));
                }
                let start = spec.origin + anchor;
                points.iter().map(|&p| (p - start).round()).collect()
            }
        };
        let seq = Self {
            sprite_box,
            tip: truth.tips.first().copied(),
            sprite,
            offsets,
            spec,
        };
        for (i, o) in seq.offsets.iter().enumerate() {
            let b = seq.box_at(*o);
            if b.x < 10.0
                || b.y < 10.0
                || b.x + b.w > seq.spec.width as f64 - 10.0
                || b.y + b.h > seq.spec.height as f64 - 10.0
            {
                return Err(Error::SpecOutOfBounds(format!(
                    "hand closer than 10 px to the frame border at frame {i}"
                )));
            }
        }
        Ok(seq)
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.frames
    }

    pub fn is_empty(&self) -> bool {
        self.spec.frames == 0
    }

    fn top_left(&self, offset: Point) -> Point {
        self.spec.origin + offset
    }

    fn box_at(&self, offset: Point) -> HandRegion {
        let (x, y, w, h) = self.sprite_box;
        let tl = self.top_left(offset);
        HandRegion::new(tl.x + x as f64, tl.y + y as f64, w as f64, h as f64)
    }

    pub fn truth(&self, i: usize) -> FrameTruth {
        let o = self.offsets[i];
        FrameTruth {
            frame: i,
            bbox: self.box_at(o),
            tip: self.tip.map(|t| self.top_left(o) + t),
        }
    }

    pub fn truths(&self) -> SequenceTruth {
        SequenceTruth {
            frames: (0..self.len()).map(|i| self.truth(i)).collect(),
        }
    }

    /// The hand mask of frame `i` in frame coordinates, with the wrist stem
    /// continued to the bottom border.
    pub fn hand_mask(&self, i: usize) -> BinaryMask {
        let tl = self.top_left(self.offsets[i]);
        let (ox, oy) = (tl.x.round() as i64, tl.y.round() as i64);
        let (sw, sh) = self.sprite.dims();
        let (w, h) = (self.spec.width, self.spec.height);
        let mut m = BinaryMask::new(w, h);
        for (x, y) in self.sprite.foreground() {
            let (fx, fy) = (x as i64 + ox, y as i64 + oy);
            if fx >= 0 && fy >= 0 && (fx as usize) < w && (fy as usize) < h {
                m.set(fx as usize, fy as usize, true);
            }
        }
        let below = oy + sh as i64;
        for x in 0..sw {
            if self.sprite.get(x, sh - 1) {
                let fx = x as i64 + ox;
                if fx < 0 || fx as usize >= w {
                    continue;
                }
                for fy in below.max(0)..h as i64 {
                    m.set(fx as usize, fy as usize, true);
                }
            }
        }
        m
    }

    pub fn frame(&self, i: usize) -> Image {
        let mask = self.hand_mask(i);
        let (w, h) = mask.dims();
        let noise = self.spec.noise as i16;
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut data = Vec::with_capacity(w * h * 3);
        for (k, &on) in mask.bits().iter().enumerate() {
            let base = if on { SKIN_RGB } else { self.spec.background };
            // Texture so a correlation tracker has something to lock onto.
            let (x, y) = (k % w, k / w);
            let tex = if on { 0 } else { (((x / 16) + (y / 16)) % 2) as i16 * 12 };
            for c in base {
                let n = if noise > 0 { rng.gen_range(-noise..=noise) } else { 0 };
                data.push((c as i16 + tex + n).clamp(0, 255) as u8);
            }
        }
        Image::from_raw(w, h, 3, data).expect("frame buffer matches dims")
    }

    /// Writes `frame_000001.ppm`... and `truth.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for i in 0..self.len() {
            pnm::write_image(dir.join(frame_file_name(i)), &self.frame(i))?;
        }
        self.truths().write(dir.join("truth.json"))
    }
}

/// File name of 0-based frame `i` in a frame directory.
pub fn frame_file_name(i: usize) -> String {
    format!("frame_{:06}.ppm", i + 1)
}

/// A 640×480 sequence of a one-finger hand moving at constant velocity.
pub fn moving_hand_sequence(seed: u64, frames: usize, dx: f64, dy: f64) -> Result<SyntheticSequence> {
    let mut hand = SynthHandSpec::random(1, seed)?;
    hand.width = 160;
    hand.palm_center.x = 80.0;
    hand.fingers[0].angle = 90.0 + (hand.fingers[0].angle - 90.0) * 0.6;
    let dx_total = dx * frames.saturating_sub(1) as f64;
    let dy_total = dy * frames.saturating_sub(1) as f64;
    let (fw, fh) = (640.0, 480.0);
    let ox = (fw - hand.width as f64 - dx_total) / 2.0;
    let oy = (fh - hand.height as f64 - dy_total) / 2.0;
    SyntheticSequence::new(SequenceSpec {
        width: 640,
        height: 480,
        hand,
        origin: Point::new(ox.round(), oy.round()),
        motion: Motion::Constant { dx, dy },
        frames,
        background: default_background(),
        noise: 4,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_fingers_is_disk_and_stem() {
        let spec = SynthHandSpec::random(0, 3).unwrap();
        let (m, t) = synth_hand(&spec).unwrap();
        assert_eq!(t.finger_count, 0);
        assert!(t.tips.is_empty());
        let c = spec.palm_center.rounded();
        assert!(m.get(c.0 as usize, c.1 as usize));
        assert!(m.get(c.0 as usize, spec.height - 1));
        assert!(!m.get(0, 0));
    }

    #[test]
    fn same_seed_same_mask() {
        for n in 0..=5 {
            let a = synth_hand(&SynthHandSpec::random(n, 42).unwrap()).unwrap();
            let b = synth_hand(&SynthHandSpec::random(n, 42).unwrap()).unwrap();
            assert_eq!(a, b);
        }
        assert_ne!(SynthHandSpec::random(2, 1).unwrap(), SynthHandSpec::random(2, 2).unwrap());
    }

    #[test]
    fn truth_tip_is_extreme_foreground_point() {
        let spec = SynthHandSpec::random(1, 9).unwrap();
        let (m, t) = synth_hand(&spec).unwrap();
        let tip = t.tips[0];
        let (tx, ty) = tip.rounded();
        assert!(m.get_signed(tx, ty) || m.foreground().any(|(x, y)| Point::new(x as f64, y as f64).distance(tip) <= 1.0));
        let dir = spec.fingers[0].dir();
        let reach = m
            .foreground()
            .map(|(x, y)| {
                let p = Point::new(x as f64, y as f64) - spec.palm_center;
                p.x * dir.x + p.y * dir.y
            })
            .fold(f64::MIN, f64::max);
        assert!((reach - spec.fingers[0].length).abs() <= 1.0, "{reach}");
    }

    #[test]
    fn out_of_bounds_specs_rejected() {
        let mut s = SynthHandSpec::random(1, 0).unwrap();
        s.fingers[0].width = 4.0;
        assert!(matches!(synth_hand(&s), Err(Error::SpecOutOfBounds(_))));
        let mut s = SynthHandSpec::random(1, 0).unwrap();
        s.fingers[0].length = 2.0 * s.palm_radius;
        assert!(matches!(synth_hand(&s), Err(Error::SpecOutOfBounds(_))));
        let mut s = SynthHandSpec::random(1, 0).unwrap();
        s.fingers[0].length = 500.0;
        assert!(matches!(synth_hand(&s), Err(Error::SpecOutOfBounds(_))));
        assert!(SynthHandSpec::random(6, 0).is_err());
    }

    #[test]
    fn zero_motion_frames_identical() {
        let mut seq = moving_hand_sequence(1, 10, 0.0, 0.0).unwrap();
        seq.spec.noise = 0;
        let f0 = seq.frame(0);
        for i in 1..10 {
            assert_eq!(seq.frame(i), f0);
            assert_eq!(seq.truth(i).bbox, seq.truth(0).bbox);
        }
    }

    #[test]
    fn constant_motion_moves_truth_tip() {
        let seq = moving_hand_sequence(2, 60, 3.0, 0.0).unwrap();
        let t0 = seq.truth(0).tip.unwrap();
        for i in 1..60 {
            let t = seq.truth(i).tip.unwrap();
            assert_eq!(t.x - t0.x, 3.0 * i as f64);
            assert_eq!(t.y, t0.y);
        }
    }

    #[test]
    fn path_motion_follows_glyph_path() {
        let three = CharClass::new('3').unwrap();
        let hand = {
            let mut h = SynthHandSpec::random(1, 5).unwrap();
            h.fingers[0].angle = 90.0;
            h
        };
        let pts: Vec<Point> = sample_glyph_path(three, Point::new(300.0, 100.0), 80.0, 40)
            .into_iter()
            .map(Point::round)
            .collect();
        let tip0 = hand.tips()[0];
        let spec = SequenceSpec {
            width: 640,
            height: 480,
            origin: (pts[0] - tip0).round(),
            hand,
            motion: Motion::Path { points: pts.clone() },
            frames: 40,
            background: default_background(),
            noise: 0,
            seed: 0,
        };
        let seq = SyntheticSequence::new(spec).unwrap();
        let offset = seq.truth(0).tip.unwrap() - pts[0];
        for (i, p) in pts.iter().enumerate() {
            let t = seq.truth(i).tip.unwrap() - offset;
            assert!(t.distance(*p) < 1e-9, "{i}: {t:?} vs {p:?}");
        }
    }

    #[test]
    fn polyline_sampling_is_even() {
        let path = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(10.0, 10.0)];
        let s = sample_polyline(&path, 5);
        assert_eq!(s, vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 5.0),
            Point::new(10.0, 10.0)
        ]);
    }
}
