use super::{BinaryMask, Point};
use crate::{Error, Result};

/// Centroid `(M10 / M00, M01 / M00)` of a binary region.
pub fn moments_centroid(mask: &BinaryMask) -> Result<Point> {
    let (mut m00, mut m10, mut m01) = (0u64, 0u64, 0u64);
    for (x, y) in mask.foreground() {
        m00 += 1;
        m10 += x as u64;
        m01 += y as u64;
    }
    if m00 == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(Point::new(m10 as f64 / m00 as f64, m01 as f64 / m00 as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel() {
        let mut m = BinaryMask::new(10, 10);
        m.set(7, 4, true);
        assert_eq!(moments_centroid(&m).unwrap(), Point::new(7.0, 4.0));
    }

    #[test]
    fn symmetric_square() {
        let m = BinaryMask::from_fn(11, 11, |x, y| (3..8).contains(&x) && (3..8).contains(&y));
        assert_eq!(moments_centroid(&m).unwrap(), Point::new(5.0, 5.0));
    }

    #[test]
    fn l_shape() {
        let m = BinaryMask::from_ascii(&["##", "#."]);
        let c = moments_centroid(&m).unwrap();
        assert!((c.x - 1.0 / 3.0).abs() < 1e-12 && (c.y - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_errors() {
        assert!(matches!(moments_centroid(&BinaryMask::new(2, 2)), Err(Error::EmptyMask)));
    }
}
