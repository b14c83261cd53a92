use super::Image;
use crate::par;

/// Full-range RGB to YCbCr (ITU-R BT.601 coefficients), unrounded.
#[inline]
pub fn rgb_to_ycbcr(r: u8, g: u8, b: u8) -> [f64; 3] {
    let (r, g, b) = (r as f64, g as f64, b as f64);
    [
        0.2990 * r + 0.5870 * g + 0.1140 * b,
        -0.1687 * r + -0.3313 * g + 0.5000 * b + 128.0,
        0.5000 * r + -0.4187 * g + -0.0813 * b + 128.0,
    ]
}

/// Luma of one RGB sample, unrounded.
#[inline]
pub fn rgb_to_gray(r: u8, g: u8, b: u8) -> f64 {
    0.2990 * r as f64 + 0.5870 * g as f64 + 0.1140 * b as f64
}

/// Single-channel luma image (rounded to nearest). Grayscale input is copied.
pub fn to_grayscale(img: &Image) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let src = img.data();
    let mut out = vec![0u8; w * h];
    par::for_each_row_mut(&mut out, w, |y, row| {
        let line = &src[y * w * 3..(y + 1) * w * 3];
        for (dst, px) in row.iter_mut().zip(line.chunks_exact(3)) {
            *dst = rgb_to_gray(px[0], px[1], px[2]).round().clamp(0.0, 255.0) as u8;
        }
    });
    Image::from_raw(w, h, 1, out).expect("dimensions are consistent")
}
