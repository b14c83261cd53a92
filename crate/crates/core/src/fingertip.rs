//! Fingertip localization on the hand contour.
//!
//! The contour is resampled at `n` uniform arc-length points. Each point gets
//! a curvature entropy `ũ = (1 - cos α) / 2` from its turning angle `α` and a
//! normalized centroid distance `δ`; the signature `Ψ = ũ · δ^γ` peaks at the
//! fingertip.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::imgproc::{resample_contour, trace_contour};
use crate::{BinaryMask, Contour, Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignatureConfig {
    pub samples: usize,
    pub gamma: f64,
    /// Zero the signature where a sample or its neighbors sit on the raster
    /// border, where the mask was cut rather than shaped by the hand.
    pub ignore_border: bool,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        Self {
            samples: 128,
            gamma: 2.5,
            ignore_border: true,
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 16 {
            return Err(Error::InvalidParameter(format!("fingertip samples {} < 16", self.samples)));
        }
        if !(1.0..=5.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!("fingertip gamma {} outside [1, 5]", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureSeries {
    pub points: Vec<Point>,
    pub turning: Vec<f64>,
    pub entropy: Vec<f64>,
    pub distance: Vec<f64>,
    pub psi: Vec<f64>,
}

impl SignatureSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the largest `Ψ`, first one on ties.
    pub fn argmax(&self) -> usize {
        argmax_first(&self.psi)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y,alpha,entropy,distance,psi\n");
        for i in 0..self.len() {
            let p = self.points[i];
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{}",
                p.x, p.y, self.turning[i], self.entropy[i], self.distance[i], self.psi[i]
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FingertipDetection {
    pub position: Point,
    /// Index into the resampled contour.
    pub index: usize,
    pub psi_max: f64,
    /// `Ψ_max` minus the next highest local maximum.
    pub margin: f64,
}

fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Unsigned angle between incoming and outgoing segments at every point of a
/// closed polygon, in `[0, π]`.
pub fn turning_angles(c: &Contour) -> Result<Vec<f64>> {
    let n = c.points.len();
    if n < 3 {
        return Err(Error::DegenerateContour);
    }
    (0..n)
        .map(|i| {
            let prev = c.points[(i + n - 1) % n];
            let cur = c.points[i];
            let next = c.points[(i + 1) % n];
            turning_angle(prev, cur, next).ok_or(Error::DegenerateContour)
        })
        .collect()
}

/// `None` when either segment has zero length.
pub fn turning_angle(prev: Point, cur: Point, next: Point) -> Option<f64> {
    let a = cur - prev;
    let b = next - cur;
    if (a.x == 0.0 && a.y == 0.0) || (b.x == 0.0 && b.y == 0.0) {
        return None;
    }
    let cross = a.x * b.y - a.y * b.x;
    let dot = a.x * b.x + a.y * b.y;
    Some(cross.abs().atan2(dot))
}

/// `(1 - cos α) / 2` per angle.
pub fn curvature_entropy(alpha: &[f64]) -> Vec<f64> {
    alpha.iter().map(|&a| entropy_of(a)).collect()
}

#[inline]
pub fn entropy_of(alpha: f64) -> f64 {
    (1.0 - alpha.cos()) / 2.0
}

pub fn signature(c: &Contour, centroid: Point, cfg: &SignatureConfig) -> Result<SignatureSeries> {
    if !(centroid.x.is_finite() && centroid.y.is_finite()) {
        return Err(Error::InvalidParameter("centroid must be finite".into()));
    }
    let turning = turning_angles(c)?;
    let entropy = curvature_entropy(&turning);
    let raw: Vec<f64> = c.points.iter().map(|p| p.distance(centroid)).collect();
    let max = raw.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateContour);
    }
    let distance: Vec<f64> = raw.iter().map(|d| d / max).collect();
    let psi = entropy
        .iter()
        .zip(&distance)
        .map(|(u, d)| u * d.powf(cfg.gamma))
        .collect();
    Ok(SignatureSeries {
        points: c.points.clone(),
        turning,
        entropy,
        distance,
        psi,
    })
}

/// Rotates a closed contour so it starts at the point farthest from `from`.
fn start_at_farthest(c: &Contour, from: Point) -> Contour {
    let d: Vec<f64> = c.points.iter().map(|p| p.distance(from)).collect();
    let k = argmax_first(&d);
    let mut points = c.points.clone();
    points.rotate_left(k);
    Contour { points, closed: c.closed }
}

fn border_touch(p: Point, width: usize, height: usize) -> bool {
    const TOL: f64 = 0.5;
    p.x <= TOL || p.y <= TOL || p.x >= width as f64 - 1.0 - TOL || p.y >= height as f64 - 1.0 - TOL
}

/// Full signature series for a single-component mask, as used by
/// [`detect_fingertip`].
pub fn mask_signature(mask: &BinaryMask, centroid: Point, cfg: &SignatureConfig) -> Result<SignatureSeries> {
    cfg.validate()?;
    let traced = trace_contour(mask)?;
    if traced.len() < 3 || traced.perimeter() < 16.0 {
        return Err(Error::DegenerateContour);
    }
    // Starting the walk at the extreme point puts a sample on the apex of
    // the most protruding feature and makes sampling independent of where
    // the raster scan first meets the hand.
    let anchored = start_at_farthest(&traced, centroid);
    let resampled = resample_contour(&anchored, cfg.samples)?;
    let mut series = signature(&resampled, centroid, cfg)?;
    if cfg.ignore_border {
        let (w, h) = mask.dims();
        let n = series.len();
        let on_border: Vec<bool> = series.points.iter().map(|&p| border_touch(p, w, h)).collect();
        for i in 0..n {
            if on_border[(i + n - 1) % n] || on_border[i] || on_border[(i + 1) % n] {
                series.psi[i] = 0.0;
            }
        }
    }
    Ok(series)
}

pub fn detect_from_series(series: &SignatureSeries) -> FingertipDetection {
    let n = series.len();
    let best = series.argmax();
    let psi = &series.psi;
    let second = (0..n)
        .filter(|&i| i != best && psi[i] >= psi[(i + n - 1) % n] && psi[i] >= psi[(i + 1) % n])
        .map(|i| psi[i])
        .fold(0.0, f64::max);
    FingertipDetection {
        position: series.points[best],
        index: best,
        psi_max: psi[best],
        margin: psi[best] - second,
    }
}

/// Traces the hand contour, computes `Ψ`, and returns its maximum.
pub fn detect_fingertip(mask: &BinaryMask, centroid: Point, cfg: &SignatureConfig) -> Result<FingertipDetection> {
    Ok(detect_from_series(&mask_signature(mask, centroid, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn polygon(points: &[(f64, f64)]) -> Contour {
        Contour {
            points: points.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            closed: true,
        }
    }

    #[test]
    fn turning_angle_cases() {
        let p = |x, y| Point::new(x, y);
        assert_eq!(turning_angle(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)), Some(0.0));
        assert!((turning_angle(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!(turning_angle(p(1.0, 0.0), p(1.0, 0.0), p(0.0, 0.0)).is_none());
        assert!((turning_angle(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.0)).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn regular_polygon_turns_evenly() {
        let n = 24;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                (10.0 * a.cos(), 10.0 * a.sin())
            })
            .collect();
        for a in turning_angles(&polygon(&pts)).unwrap() {
            assert!((a - 2.0 * PI / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_values() {
        let u = curvature_entropy(&[0.0, FRAC_PI_2, PI]);
        assert_eq!(u[0], 0.0);
        assert!((u[1] - 0.5).abs() < 1e-15);
        assert_eq!(u[2], 1.0);
    }

    #[test]
    fn circle_signature_is_flat() {
        let pts: Vec<(f64, f64)> = (0..64)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 64.0;
                (5.0 + 8.0 * a.cos(), 7.0 + 8.0 * a.sin())
            })
            .collect();
        let s = signature(&polygon(&pts), Point::new(5.0, 7.0), &SignatureConfig::default()).unwrap();
        for i in 0..64 {
            assert!((s.distance[i] - 1.0).abs() < 1e-12);
            assert!((s.psi[i] - s.psi[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn square_peaks_at_corners() {
        let sq = polygon(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]);
        let r = resample_contour(&sq, 16).unwrap();
        let s = signature(&r, Point::new(5.0, 5.0), &SignatureConfig::default()).unwrap();
        for (p, psi) in s.points.iter().zip(&s.psi) {
            let corner = (p.x == 0.0 || p.x == 10.0) && (p.y == 0.0 || p.y == 10.0);
            if corner {
                assert!((psi - 0.5).abs() < 1e-12);
            } else {
                assert!(psi.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn all_points_on_centroid_is_degenerate() {
        let c = polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        assert!(signature(&c, Point::new(f64::NAN, 0.0), &SignatureConfig::default()).is_err());
        let tiny = BinaryMask::from_ascii(&["##", "##"]);
        assert!(matches!(
            detect_fingertip(&tiny, Point::new(0.5, 0.5), &SignatureConfig::default()),
            Err(Error::DegenerateContour)
        ));
    }

    fn finger_hand(w: usize, h: usize, c: Point, palm: f64, tip: Point, hw: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let p = Point::new(x as f64, y as f64);
            if p.distance(c) <= palm {
                return true;
            }
            // Capsule whose far end reaches `tip`.
            let dir = tip - c;
            let len = (dir.x * dir.x + dir.y * dir.y).sqrt();
            let (ux, uy) = (dir.x / len, dir.y / len);
            let end = Point::new(tip.x - ux * hw, tip.y - uy * hw);
            let seg = end - c;
            let q = p - c;
            let t = ((q.x * seg.x + q.y * seg.y) / (seg.x * seg.x + seg.y * seg.y)).clamp(0.0, 1.0);
            (q.x - t * seg.x).hypot(q.y - t * seg.y) <= hw
        })
    }

    #[test]
    fn finds_tip_of_disk_plus_finger() {
        let c = Point::new(50.0, 70.0);
        let tip = Point::new(62.0, 8.0);
        let m = finger_hand(100, 100, c, 18.0, tip, 3.5);
        let d = detect_fingertip(&m, c, &SignatureConfig::default()).unwrap();
        assert!(d.position.distance(tip) <= 3.0, "{:?}", d.position);
        assert!(d.margin >= 0.0);
    }

    #[test]
    fn entropy_scale_does_not_move_argmax() {
        let c = Point::new(50.0, 70.0);
        let m = finger_hand(100, 100, c, 18.0, Point::new(40.0, 10.0), 3.0);
        let s = mask_signature(&m, c, &SignatureConfig::default()).unwrap();
        let scaled: Vec<f64> = s.psi.iter().map(|p| p * 0.37).collect();
        assert_eq!(argmax_first(&scaled), s.argmax());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sq = resample_contour(&polygon(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]), 16).unwrap();
        let s = signature(&sq, Point::new(2.0, 2.0), &SignatureConfig::default()).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("index,x,y,alpha,entropy,distance,psi\n"));
        assert_eq!(csv.lines().count(), 17);
    }
}
