//! Writing-pose detection: palm centroid, inscribed circle, and raised-finger
//! counting by walking a ring of radius `M_r · r` around the centroid.

use serde::{Deserialize, Serialize};

use crate::imgproc::{distance_transform, moments_centroid};
use crate::{BinaryMask, Error, FloatField, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentroidEstimate {
    /// Distance-transform peak.
    pub dt_peak: Point,
    /// Moments centroid.
    pub moment: Point,
    /// Mean of the two.
    #[serde(rename = "final")]
    pub final_: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FingerCount {
    pub inner_radius: f64,
    pub ring_radius: f64,
    pub magnification: f64,
    pub crossings: usize,
    /// `crossings / 2 - 1`, floored at zero for a ring that never crosses.
    pub fingers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseVerdict {
    Writing,
    NonWriting,
    Indeterminate,
}

impl PoseVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            PoseVerdict::Writing => "writing",
            PoseVerdict::NonWriting => "non_writing",
            PoseVerdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseConfig {
    /// Ring magnification `M_r`.
    pub magnification: f64,
}

impl Default for PoseConfig {
    fn default() -> Self {
        Self { magnification: 1.5 }
    }
}

impl PoseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.magnification > 1.0 && self.magnification.is_finite()) {
            return Err(Error::InvalidParameter("pose magnification must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandPoseResult {
    pub centroid: CentroidEstimate,
    pub count: FingerCount,
    pub verdict: PoseVerdict,
}

fn centroid_from(dt: &FloatField, mask: &BinaryMask) -> Result<CentroidEstimate> {
    let moment = moments_centroid(mask)?;
    let (px, py) = dt.argmax();
    let dt_peak = Point::new(px as f64, py as f64);
    let final_ = Point::new((dt_peak.x + moment.x) / 2.0, (dt_peak.y + moment.y) / 2.0);
    Ok(CentroidEstimate { dt_peak, moment, final_ })
}

pub fn hand_centroid(mask: &BinaryMask) -> Result<CentroidEstimate> {
    centroid_from(&distance_transform(mask), mask)
}

fn radius_from(dt: &FloatField, mask: &BinaryMask, center: Point) -> Result<f64> {
    let (x, y) = center.rounded();
    if !mask.get_signed(x, y) {
        return Err(Error::CenterOnBackground {
            x: center.x,
            y: center.y,
        });
    }
    Ok(dt.get(x as usize, y as usize))
}

/// Radius of the largest background-free circle at `center` (rounded to the
/// nearest pixel).
pub fn inner_circle_radius(mask: &BinaryMask, center: Point) -> Result<f64> {
    radius_from(&distance_transform(mask), mask, center)
}

/// Midpoint-circle pixels around `(cx, cy)`, in increasing angle, without
/// repeats.
pub fn ring_pixels(cx: i64, cy: i64, radius: i64) -> Vec<(i64, i64)> {
    let mut offsets = Vec::with_capacity(8 * radius.max(1) as usize);
    let (mut x, mut y, mut err) = (radius, 0i64, 1 - radius);
    while x >= y {
        offsets.extend([
            (x, y),
            (y, x),
            (-y, x),
            (-x, y),
            (-x, -y),
            (-y, -x),
            (y, -x),
            (x, -y),
        ]);
        y += 1;
        if err < 0 {
            err += 2 * y + 1;
        } else {
            x -= 1;
            err += 2 * (y - x) + 1;
        }
    }
    let angle = |&(dx, dy): &(i64, i64)| (dy as f64).atan2(dx as f64);
    offsets.sort_by(|a, b| angle(a).total_cmp(&angle(b)).then(a.cmp(b)));
    offsets.dedup();
    offsets.into_iter().map(|(dx, dy)| (cx + dx, cy + dy)).collect()
}

/// Background/foreground transitions around the closed ring. Samples outside
/// the raster count as background.
fn ring_crossings(mask: &BinaryMask, center: Point, radius: f64) -> usize {
    let (cx, cy) = center.rounded();
    let samples: Vec<bool> = ring_pixels(cx, cy, radius.round() as i64)
        .into_iter()
        .map(|(x, y)| mask.get_signed(x, y))
        .collect();
    let n = samples.len();
    (0..n).filter(|&i| samples[i] != samples[(i + 1) % n]).count()
}

pub fn count_raised_fingers(mask: &BinaryMask, center: Point, r: f64, magnification: f64) -> Result<FingerCount> {
    let ring_radius = magnification * r;
    if !(ring_radius >= 3.0) {
        return Err(Error::RingDegenerate(ring_radius));
    }
    let crossings = ring_crossings(mask, center, ring_radius);
    if crossings % 2 == 1 {
        return Err(Error::OddCrossings(crossings));
    }
    Ok(FingerCount {
        inner_radius: r,
        ring_radius,
        magnification,
        crossings,
        fingers: (crossings / 2).saturating_sub(1),
    })
}

/// Centroid, finger count, and verdict with one distance transform.
pub fn analyze_pose(mask: &BinaryMask, cfg: &PoseConfig) -> Result<HandPoseResult> {
    let dt = distance_transform(mask);
    let centroid = centroid_from(&dt, mask)?;
    let r = radius_from(&dt, mask, centroid.final_)?;
    let count = count_raised_fingers(mask, centroid.final_, r, cfg.magnification)?;
    let verdict = if count.fingers == 1 {
        PoseVerdict::Writing
    } else {
        PoseVerdict::NonWriting
    };
    Ok(HandPoseResult { centroid, count, verdict })
}

/// Writing iff exactly one raised finger; any failure to count is
/// indeterminate.
pub fn is_writing_pose(mask: &BinaryMask) -> PoseVerdict {
    is_writing_pose_with(mask, &PoseConfig::default())
}

pub fn is_writing_pose_with(mask: &BinaryMask, cfg: &PoseConfig) -> PoseVerdict {
    analyze_pose(mask, cfg).map_or(PoseVerdict::Indeterminate, |p| p.verdict)
}
