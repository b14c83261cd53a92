use super::BinaryMask;
use crate::{Error, Result};

/// One 8-connected foreground component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub area: usize,
    /// First pixel in row-major order.
    pub first: (usize, usize),
    /// Inclusive bounds `(x0, y0, x1, y1)`.
    pub bbox: (usize, usize, usize, usize),
    /// Row-major pixel indices.
    pub pixels: Vec<usize>,
}

const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// All 8-connected components, ordered by their first row-major pixel.
pub fn components(mask: &BinaryMask) -> Vec<Component> {
    let (w, h) = mask.dims();
    let bits = mask.bits();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !bits[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        let (sx, sy) = (start % w, start / w);
        let mut bbox = (sx, sy, sx, sy);
        while let Some(i) = stack.pop() {
            pixels.push(i);
            let (x, y) = (i % w, i / w);
            bbox = (bbox.0.min(x), bbox.1.min(y), bbox.2.max(x), bbox.3.max(y));
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if bits[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        pixels.sort_unstable();
        out.push(Component {
            area: pixels.len(),
            first: (sx, sy),
            bbox,
            pixels,
        });
    }
    out
}

/// Keeps only the largest 8-connected component. Ties go to the component
/// whose first pixel comes first in row-major order.
pub fn largest_component(mask: &BinaryMask) -> Result<BinaryMask> {
    let comps = components(mask);
    let best = comps
        .iter()
        .fold(None::<&Component>, |best, c| match best {
            Some(b) if b.area >= c.area => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::EmptyMask)?;
    let mut out = BinaryMask::new(mask.width(), mask.height());
    for &i in &best.pixels {
        out.bits_mut()[i] = true;
    }
    Ok(out)
}
