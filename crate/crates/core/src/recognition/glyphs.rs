//! Unistroke glyph paths for `0-9a-z` and the default template set rendered
//! from them.

use super::{CharClass, Template, TemplateSet};
use crate::trajectory::{rasterize_points, RASTER_SIDE};
use crate::{Image, Point};

/// Rendered variants per class: upright, slanted, rotated and narrowed.
pub const VARIANTS: usize = 3;

struct PathBuilder(Vec<Point>);

impl PathBuilder {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn line(mut self, pts: &[(f64, f64)]) -> Self {
        self.0.extend(pts.iter().map(|&(x, y)| Point::new(x, y)));
        self
    }

    /// Elliptical arc from `a0` to `a1` degrees; `y` grows downward, so
    /// increasing angles run clockwise on screen.
    fn arc(mut self, cx: f64, cy: f64, rx: f64, ry: f64, a0: f64, a1: f64) -> Self {
        let steps = ((a1 - a0).abs() / 10.0).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let a = (a0 + (a1 - a0) * i as f64 / steps as f64).to_radians();
            self.0.push(Point::new(cx + rx * a.cos(), cy + ry * a.sin()));
        }
        self
    }

    fn done(self) -> Vec<Point> {
        self.0
    }
}

/// The pen path of `label` in a unit box (x right, y down).
pub fn glyph_path(label: CharClass) -> Vec<Point> {
    let p = PathBuilder::new();
    match label.as_char() {
        '0' => p.arc(0.5, 0.5, 0.3, 0.5, -90.0, 270.0),
        '1' => p.line(&[(0.3, 0.2), (0.55, 0.0), (0.55, 1.0), (0.25, 1.0), (0.85, 1.0)]),
        '2' => p.arc(0.5, 0.28, 0.32, 0.28, 200.0, 400.0).line(&[(0.1, 1.0), (0.9, 1.0)]),
        '3' => p
            .arc(0.5, 0.25, 0.3, 0.25, 200.0, 450.0)
            .arc(0.5, 0.75, 0.32, 0.25, -90.0, 160.0),
        '4' => p.line(&[(0.7, 1.0), (0.7, 0.0), (0.05, 0.68), (0.95, 0.68)]),
        '5' => p
            .line(&[(0.85, 0.0), (0.25, 0.0), (0.22, 0.45)])
            .arc(0.5, 0.68, 0.33, 0.3, -140.0, 150.0),
        '6' => p
            .line(&[(0.75, 0.0), (0.45, 0.1), (0.22, 0.4)])
            .arc(0.48, 0.72, 0.33, 0.28, 180.0, -180.0),
        '7' => p.line(&[(0.05, 0.0), (0.95, 0.0), (0.35, 1.0)]),
        '8' => p
            .arc(0.5, 0.25, 0.27, 0.25, 0.0, -270.0)
            .arc(0.5, 0.75, 0.3, 0.25, -90.0, 270.0)
            .line(&[(0.77, 0.25)]),
        '9' => p.arc(0.5, 0.28, 0.3, 0.28, 0.0, -360.0).line(&[(0.75, 1.0)]),
        'a' => p
            .arc(0.45, 0.55, 0.33, 0.4, -20.0, -360.0)
            .line(&[(0.8, 0.15), (0.8, 0.95), (0.92, 1.0)]),
        'b' => p.line(&[(0.23, 0.0), (0.23, 0.98)]).arc(0.5, 0.72, 0.27, 0.27, 150.0, -210.0),
        'c' => p.arc(0.55, 0.5, 0.4, 0.5, -40.0, -320.0),
        'd' => p.arc(0.4, 0.7, 0.3, 0.3, -10.0, -360.0).line(&[(0.72, 0.0), (0.72, 1.0)]),
        'e' => p.line(&[(0.15, 0.55), (0.85, 0.55)]).arc(0.5, 0.55, 0.35, 0.45, 0.0, -320.0),
        'f' => p
            .arc(0.6, 0.2, 0.22, 0.2, -20.0, -180.0)
            .line(&[(0.38, 1.0), (0.38, 0.45), (0.1, 0.45), (0.7, 0.45)]),
        'g' => p
            .arc(0.45, 0.3, 0.3, 0.3, -10.0, -360.0)
            .line(&[(0.75, 0.05), (0.75, 0.8)])
            .arc(0.45, 0.8, 0.3, 0.2, 0.0, 160.0),
        'h' => p
            .line(&[(0.2, 0.0), (0.2, 1.0), (0.2, 0.6)])
            .arc(0.48, 0.65, 0.28, 0.3, 180.0, 360.0)
            .line(&[(0.76, 1.0)]),
        'i' => p
            .arc(0.5, 0.08, 0.08, 0.08, 90.0, 450.0)
            .line(&[(0.5, 0.3), (0.5, 1.0), (0.75, 0.92)]),
        'j' => p.line(&[(0.65, 0.0), (0.65, 0.75)]).arc(0.4, 0.75, 0.25, 0.25, 0.0, 160.0),
        'k' => p.line(&[(0.2, 0.0), (0.2, 1.0), (0.2, 0.6), (0.8, 0.1), (0.3, 0.55), (0.85, 1.0)]),
        'l' => p.line(&[
            (0.15, 0.95),
            (0.55, 0.45),
            (0.65, 0.2),
            (0.55, 0.02),
            (0.4, 0.08),
            (0.35, 0.35),
            (0.4, 0.75),
            (0.55, 0.95),
            (0.8, 0.95),
        ]),
        'm' => p
            .line(&[(0.1, 1.0), (0.1, 0.3)])
            .arc(0.3, 0.45, 0.2, 0.2, 180.0, 360.0)
            .line(&[(0.5, 1.0), (0.5, 0.45)])
            .arc(0.7, 0.45, 0.2, 0.2, 180.0, 360.0)
            .line(&[(0.9, 1.0)]),
        'n' => p
            .line(&[(0.2, 1.0), (0.2, 0.3)])
            .arc(0.5, 0.5, 0.3, 0.3, 180.0, 360.0)
            .line(&[(0.8, 1.0)]),
        'o' => p.arc(0.5, 0.5, 0.45, 0.45, -90.0, 270.0),
        'p' => p.line(&[(0.22, 0.2), (0.22, 1.0)]).arc(0.45, 0.4, 0.25, 0.22, 150.0, -210.0),
        'q' => p
            .arc(0.42, 0.35, 0.3, 0.32, -10.0, -360.0)
            .line(&[(0.72, 0.05), (0.72, 1.0), (0.95, 0.85)]),
        'r' => p
            .line(&[(0.25, 0.2), (0.25, 1.0), (0.25, 0.55)])
            .arc(0.5, 0.5, 0.25, 0.28, 180.0, 300.0),
        's' => p
            .arc(0.5, 0.25, 0.3, 0.25, -20.0, -270.0)
            .arc(0.5, 0.75, 0.3, 0.25, -90.0, 160.0),
        't' => p.line(&[(0.1, 0.3), (0.9, 0.3), (0.5, 0.0), (0.5, 0.9), (0.75, 1.0)]),
        'u' => p
            .line(&[(0.2, 0.0), (0.2, 0.6)])
            .arc(0.5, 0.6, 0.3, 0.35, 180.0, 0.0)
            .line(&[(0.8, 0.0), (0.8, 1.0)]),
        'v' => p.line(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]),
        'w' => p.line(&[(0.0, 0.0), (0.25, 1.0), (0.5, 0.35), (0.75, 1.0), (1.0, 0.0)]),
        'x' => p.line(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]),
        'y' => p.line(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (0.3, 1.0)]),
        'z' => p.line(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]),
        other => unreachable!("no glyph for {other:?}"),
    }
    .done()
}

/// Geometric variant `v` of a unit-box path.
fn variant(points: &[Point], v: usize) -> Vec<Point> {
    match v {
        0 => points.to_vec(),
        1 => points
            .iter()
            .map(|p| Point::new(p.x + 0.18 * (0.5 - p.y), p.y))
            .collect(),
        _ => {
            let (s, c) = (-7f64).to_radians().sin_cos();
            points
                .iter()
                .map(|p| {
                    let (x, y) = ((p.x - 0.5) * 0.85, p.y - 0.5);
                    Point::new(x * c - y * s, x * s + y * c)
                })
                .collect()
        }
    }
}

/// Raster of variant `v` (`0..VARIANTS`) of `label`.
pub fn render_variant(label: CharClass, v: usize) -> Image {
    rasterize_points(&variant(&glyph_path(label), v), RASTER_SIDE).expect("glyph paths are nondegenerate")
}

/// Three machine-rendered templates per class, 108 in all.
pub fn default_templates() -> TemplateSet {
    let entries = CharClass::all()
        .flat_map(|label| {
            (0..VARIANTS).map(move |v| Template {
                label,
                raster: render_variant(label, v),
            })
        })
        .collect();
    TemplateSet::new(entries).expect("default set is nonempty")
}
