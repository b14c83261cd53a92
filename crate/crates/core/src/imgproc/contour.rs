use super::{components, BinaryMask, Contour, Point};
use crate::{Error, Result};

/// Moore neighborhood in clockwise order (y grows downward), starting west.
const RING: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn ring_index(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    RING.iter().position(|&r| r == d).expect("backtrack must be a neighbor")
}

/// One Moore step from `c`, scanning clockwise after the backtrack cell.
/// Returns the next boundary pixel and the new backtrack cell.
fn step(mask: &BinaryMask, c: (i64, i64), back: (i64, i64)) -> Option<((i64, i64), (i64, i64))> {
    let b = ring_index(c, back);
    for i in 1..=8 {
        let d = (b + i) % 8;
        let p = (c.0 + RING[d].0, c.1 + RING[d].1);
        if mask.get_signed(p.0, p.1) {
            let prev = (b + i + 7) % 8;
            return Some((p, (c.0 + RING[prev].0, c.1 + RING[prev].1)));
        }
    }
    None
}

/// Outer boundary of a single 8-connected region by Moore-neighbor tracing,
/// clockwise, starting from the first foreground pixel in row-major order.
pub fn trace_contour(mask: &BinaryMask) -> Result<Contour> {
    match components(mask).len() {
        0 => return Err(Error::EmptyMask),
        1 => {}
        n => return Err(Error::MultipleComponents(n)),
    }
    let (sx, sy) = mask.foreground().next().ok_or(Error::EmptyMask)?;
    let start = (sx as i64, sy as i64);
    let to_point = |p: (i64, i64)| Point::new(p.0 as f64, p.1 as f64);
    let mut points = vec![to_point(start)];

    let Some((second, back)) = step(mask, start, (start.0 - 1, start.1)) else {
        return Ok(Contour { points, closed: true });
    };
    let (mut c, mut b) = (second, back);
    // Every boundary pixel can be entered from at most 8 directions.
    let limit = 8 * mask.count() + 8;
    for _ in 0..limit {
        let (next, nb) = step(mask, c, b).expect("a traced pixel has a foreground neighbor");
        if c == start && next == second {
            return Ok(Contour { points, closed: true });
        }
        points.push(to_point(c));
        c = next;
        b = nb;
    }
    unreachable!("Moore tracing failed to close")
}

/// `count` points at uniform arc-length spacing along a closed contour,
/// starting at its first point.
pub fn resample_contour(c: &Contour, count: usize) -> Result<Contour> {
    if count < 8 {
        return Err(Error::InvalidParameter(format!("resample count {count} < 8")));
    }
    let n = c.points.len();
    if n < 2 {
        return Err(Error::DegenerateContour);
    }
    let total = c.perimeter();
    if total <= 0.0 {
        return Err(Error::DegenerateContour);
    }
    let seg = |i: usize| (c.points[i], c.points[(i + 1) % n]);
    let segments = if c.closed { n } else { n - 1 };
    let mut out = Vec::with_capacity(count);
    let (mut i, mut walked) = (0usize, 0.0f64);
    let mut seg_len = seg(0).0.distance(seg(0).1);
    for k in 0..count {
        let target = k as f64 * total / count as f64;
        while walked + seg_len < target && i + 1 < segments {
            walked += seg_len;
            i += 1;
            let (a, b) = seg(i);
            seg_len = a.distance(b);
        }
        let (a, b) = seg(i);
        let t = if seg_len > 0.0 {
            ((target - walked) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    Ok(Contour {
        points: out,
        closed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(c: &Contour) -> Vec<(i64, i64)> {
        c.points.iter().map(|p| p.rounded()).collect()
    }

    #[test]
    fn block_has_eight_point_contour() {
        let m = BinaryMask::from_fn(5, 5, |x, y| (1..4).contains(&x) && (1..4).contains(&y));
        let c = trace_contour(&m).unwrap();
        assert!(c.closed);
        assert_eq!(
            pts(&c),
            vec![(1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)]
        );
    }

    #[test]
    fn single_pixel_is_degenerate_closed() {
        let mut m = BinaryMask::new(3, 3);
        m.set(1, 1, true);
        let c = trace_contour(&m).unwrap();
        assert_eq!(pts(&c), vec![(1, 1)]);
        assert!(c.closed);
    }

    #[test]
    fn two_blobs_rejected() {
        let m = BinaryMask::from_ascii(&["##...", "##..#"]);
        assert!(matches!(trace_contour(&m), Err(Error::MultipleComponents(2))));
        assert!(matches!(trace_contour(&BinaryMask::new(2, 2)), Err(Error::EmptyMask)));
    }

    #[test]
    fn thin_line_traces_out_and_back() {
        let m = BinaryMask::from_ascii(&[".....", ".###.", "....."]);
        assert_eq!(pts(&trace_contour(&m).unwrap()), vec![(1, 1), (2, 1), (3, 1), (2, 1)]);
    }

    #[test]
    fn square_perimeter_forty_at_eight_samples() {
        let c = Contour {
            points: vec![
                Point::new(0.0, 0.0),
                Point::new(10.0, 0.0),
                Point::new(10.0, 10.0),
                Point::new(0.0, 10.0),
            ],
            closed: true,
        };
        let r = resample_contour(&c, 8).unwrap();
        let expect = [
            (0.0, 0.0),
            (5.0, 0.0),
            (10.0, 0.0),
            (10.0, 5.0),
            (10.0, 10.0),
            (5.0, 10.0),
            (0.0, 10.0),
            (0.0, 5.0),
        ];
        for (p, e) in r.points.iter().zip(expect) {
            assert!((p.x - e.0).abs() < 1e-12 && (p.y - e.1).abs() < 1e-12, "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn circle_gaps_are_uniform() {
        let pts: Vec<Point> = (0..360)
            .map(|i| {
                let a = (i as f64).to_radians();
                Point::new(50.0 + 30.0 * a.cos(), 50.0 + 30.0 * a.sin())
            })
            .collect();
        let r = resample_contour(&Contour { points: pts, closed: true }, 64).unwrap();
        let step = r.perimeter() / 64.0;
        for i in 0..64 {
            let gap = r.points[i].distance(r.points[(i + 1) % 64]);
            assert!((gap - step).abs() < 0.01 * step);
        }
    }

    #[test]
    fn own_count_stays_near_originals() {
        let m = BinaryMask::from_fn(30, 20, |x, y| (3..25).contains(&x) && (4..15).contains(&y));
        let c = trace_contour(&m).unwrap();
        let r = resample_contour(&c, c.len()).unwrap();
        for (a, b) in c.points.iter().zip(&r.points) {
            assert!(a.distance(*b) <= 1.0);
        }
    }

    #[test]
    fn zero_perimeter_is_degenerate() {
        let c = Contour {
            points: vec![Point::new(1.0, 1.0); 4],
            closed: true,
        };
        assert!(matches!(resample_contour(&c, 16), Err(Error::DegenerateContour)));
    }

    proptest! {
        #[test]
        fn traced_points_are_adjacent_boundary_pixels(
            cx in 8i64..24, cy in 8i64..24, rx in 2i64..7, ry in 2i64..7
        ) {
            let m = BinaryMask::from_fn(32, 32, |x, y| {
                let (dx, dy) = (x as i64 - cx, y as i64 - cy);
                (dx * dx) * ry * ry + (dy * dy) * rx * rx <= rx * rx * ry * ry
            });
            let c = trace_contour(&m).unwrap();
            let n = c.len();
            for i in 0..n {
                let (a, b) = (c.points[i].rounded(), c.points[(i + 1) % n].rounded());
                prop_assert!((a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1);
                prop_assert!(m.get(a.0 as usize, a.1 as usize));
            }
        }

        #[test]
        fn resampling_preserves_convex_perimeter(r in 10.0f64..40.0, count in 64usize..200) {
            let pts: Vec<Point> = (0..720)
                .map(|i| {
                    let a = (i as f64 * 0.5).to_radians();
                    Point::new(r * a.cos(), 0.7 * r * a.sin())
                })
                .collect();
            let c = Contour { points: pts, closed: true };
            let rs = resample_contour(&c, count).unwrap();
            prop_assert_eq!(rs.len(), count);
            prop_assert!((rs.perimeter() - c.perimeter()).abs() <= 0.01 * c.perimeter());
        }
    }
}
