use super::{BinaryMask, MorphKernel};
use crate::par;

/// Per-row prefix counts of foreground, `width + 1` entries per row.
fn row_prefix(mask: &BinaryMask) -> Vec<u32> {
    let (w, h) = mask.dims();
    let mut pre = vec![0u32; (w + 1) * h];
    for y in 0..h {
        let row = &mask.bits()[y * w..(y + 1) * w];
        let dst = &mut pre[y * (w + 1)..(y + 1) * (w + 1)];
        for x in 0..w {
            dst[x + 1] = dst[x] + row[x] as u32;
        }
    }
    pre
}

/// Shared sweep: `hit(count, span)` decides a pixel from the foreground count
/// and in-raster length of every kernel row segment. Rows outside the raster
/// are skipped.
fn sweep(mask: &BinaryMask, k: MorphKernel, combine_any: bool) -> BinaryMask {
    let (w, h) = mask.dims();
    let pre = row_prefix(mask);
    let extents = k.row_extents();
    let mut out = vec![false; w * h];
    par::for_each_row_mut(&mut out, w, |y, row| {
        for (x, dst) in row.iter_mut().enumerate() {
            let mut acc = !combine_any;
            for &(dy, half) in &extents {
                let yy = y as i64 + dy;
                if yy < 0 || yy >= h as i64 {
                    continue;
                }
                let lo = (x as i64 - half).max(0) as usize;
                let hi = ((x as i64 + half) as usize).min(w - 1);
                let base = yy as usize * (w + 1);
                let count = pre[base + hi + 1] - pre[base + lo];
                if combine_any {
                    if count > 0 {
                        acc = true;
                        break;
                    }
                } else if count as usize != hi + 1 - lo {
                    acc = false;
                    break;
                }
            }
            *dst = acc;
        }
    });
    BinaryMask::from_bits(w, h, out).expect("dimensions are consistent")
}

/// Binary dilation; pixels outside the raster count as background.
pub fn dilate(mask: &BinaryMask, k: MorphKernel) -> BinaryMask {
    sweep(mask, k, true)
}

/// Binary erosion; pixels outside the raster count as foreground, so shapes
/// touching the border are not eaten from outside.
pub fn erode(mask: &BinaryMask, k: MorphKernel) -> BinaryMask {
    sweep(mask, k, false)
}

/// Dilate, erode, dilate: a closing followed by a regularizing dilation.
pub fn morph_filter(mask: &BinaryMask, k: MorphKernel) -> BinaryMask {
    dilate(&erode(&dilate(mask, k), k), k)
}
