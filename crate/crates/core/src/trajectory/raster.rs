use super::Trajectory;
use crate::{Error, Image, Point, Result};

pub const RASTER_SIDE: usize = 28;
/// Side of the central box the stroke is fitted into on a 28-px canvas.
pub const CONTENT_SIDE: usize = 20;

/// Normalized coordinates are snapped to this grid so that scaled and
/// translated copies of a trajectory land on identical values.
const SNAP: f64 = 1e6;

fn snap(v: f64) -> f64 {
    (v * SNAP).round() / SNAP
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let ap = p - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    let t = if len2 > 0.0 {
        ((ap.x * ab.x + ap.y * ab.y) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ap.x - t * ab.x).hypot(ap.y - t * ab.y)
}

/// Draws the polyline white on black, scaled with preserved aspect into the
/// central `20/28` of a `side × side` canvas. The stroke has a tent profile
/// 2 px wide at half intensity.
pub fn rasterize_points(points: &[Point], side: usize) -> Result<Image> {
    if points.is_empty() {
        return Err(Error::TooShort(0));
    }
    if side < 4 {
        return Err(Error::InvalidParameter(format!("raster side {side} too small")));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let extent = (x1 - x0).max(y1 - y0);
    if !(extent > 0.0) {
        return Err(Error::DegenerateTrajectory);
    }
    let content = side as f64 * CONTENT_SIDE as f64 / RASTER_SIDE as f64;
    let scale = content / extent;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let mid = side as f64 / 2.0;
    let norm: Vec<Point> = points
        .iter()
        .map(|p| Point::new(snap((p.x - cx) * scale) + mid, snap((p.y - cy) * scale) + mid))
        .collect();

    let mut img = Image::new(side, side, 1);
    let segments: Vec<(Point, Point)> = if norm.len() == 1 {
        vec![(norm[0], norm[0])]
    } else {
        norm.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let mut dist = vec![f64::INFINITY; side * side];
    for &(a, b) in &segments {
        let lo_x = (a.x.min(b.x) - 2.0).floor().max(0.0) as usize;
        let hi_x = ((a.x.max(b.x) + 2.0).ceil() as usize).min(side);
        let lo_y = (a.y.min(b.y) - 2.0).floor().max(0.0) as usize;
        let hi_y = ((a.y.max(b.y) + 2.0).ceil() as usize).min(side);
        for y in lo_y..hi_y {
            for x in lo_x..hi_x {
                let d = segment_distance(Point::new(x as f64 + 0.5, y as f64 + 0.5), a, b);
                let slot = &mut dist[y * side + x];
                if d < *slot {
                    *slot = d;
                }
            }
        }
    }
    for (px, d) in img.data_mut().iter_mut().zip(dist) {
        *px = (255.0 * (1.0 - d / 2.0).clamp(0.0, 1.0)).round() as u8;
    }
    Ok(img)
}

pub fn rasterize(t: &Trajectory, side: usize) -> Result<Image> {
    let points: Vec<Point> = t.points().iter().map(|p| p.xy()).collect();
    rasterize_points(&points, side)
}
