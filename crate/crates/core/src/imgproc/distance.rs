use super::{BinaryMask, FloatField};
use crate::par;

const FAR: f64 = 1e20;

/// Squared-distance lower envelope of parabolas (Felzenszwalb–Huttenlocher),
/// in place over `f` using scratch buffers sized `f.len()` / `f.len() + 1`.
fn envelope_1d(f: &mut [f64], v: &mut [usize], z: &mut [f64], out: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
    f.copy_from_slice(out);
}

/// Exact Euclidean distance from every foreground pixel to the nearest
/// background pixel. The raster is surrounded by an implicit one-pixel
/// background ring; background pixels hold 0.
pub fn distance_transform(mask: &BinaryMask) -> FloatField {
    let (w, h) = mask.dims();
    let (pw, ph) = (w + 2, h + 2);
    let bits = mask.bits();

    // Column pass on the padded grid, stored transposed (one row per column).
    let mut cols = vec![0.0f64; pw * ph];
    par::for_each_row_mut(&mut cols, ph, |px, col| {
        if px == 0 || px == pw - 1 {
            col.fill(0.0);
            return;
        }
        let x = px - 1;
        col[0] = 0.0;
        col[ph - 1] = 0.0;
        for y in 0..h {
            col[y + 1] = if bits[y * w + x] { FAR } else { 0.0 };
        }
        let (mut v, mut z, mut out) = (vec![0usize; ph], vec![0.0; ph + 1], vec![0.0; ph]);
        envelope_1d(col, &mut v, &mut z, &mut out);
    });

    // Row pass over interior rows of the padded grid.
    let mut sq = vec![0.0f64; w * h];
    par::for_each_row_mut(&mut sq, w, |y, row| {
        let mut line: Vec<f64> = (0..pw).map(|px| cols[px * ph + y + 1]).collect();
        let (mut v, mut z, mut out) = (vec![0usize; pw], vec![0.0; pw + 1], vec![0.0; pw]);
        envelope_1d(&mut line, &mut v, &mut z, &mut out);
        row.copy_from_slice(&line[1..=w]);
    });

    let values = sq.into_iter().map(f64::sqrt).collect();
    FloatField::from_values(w, h, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Nearest background pixel by exhaustive search, including the ring.
    fn brute_force(mask: &BinaryMask) -> Vec<f64> {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let mut bg = Vec::new();
        for y in -1..=h {
            for x in -1..=w {
                if !mask.get_signed(x, y) {
                    bg.push((x, y));
                }
            }
        }
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !mask.get(x as usize, y as usize) {
                    out.push(0.0);
                    continue;
                }
                let best = bg
                    .iter()
                    .map(|&(bx, by)| (bx - x) * (bx - x) + (by - y) * (by - y))
                    .min()
                    .unwrap();
                out.push((best as f64).sqrt());
            }
        }
        out
    }

    #[test]
    fn all_background_is_zero() {
        let d = distance_transform(&BinaryMask::new(7, 5));
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lone_pixel_is_one() {
        let mut m = BinaryMask::new(5, 5);
        m.set(2, 2, true);
        assert_eq!(distance_transform(&m).get(2, 2), 1.0);
    }

    #[test]
    fn block_center_and_corners() {
        let m = BinaryMask::from_fn(5, 5, |x, y| (1..4).contains(&x) && (1..4).contains(&y));
        let d = distance_transform(&m);
        assert_eq!(d.get(2, 2), 2.0);
        for (x, y) in [(1, 1), (3, 1), (1, 3), (3, 3)] {
            assert_eq!(d.get(x, y), 1.0);
        }
    }

    #[test]
    fn full_raster_uses_implicit_ring() {
        let d = distance_transform(&BinaryMask::filled(5, 5, true));
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(2, 2), 3.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn matches_exhaustive_search(
            (w, h, bits) in (1usize..=32, 1usize..=32).prop_flat_map(|(w, h)| {
                (Just(w), Just(h), proptest::collection::vec(proptest::bool::weighted(0.8), w * h))
            })
        ) {
            let m = BinaryMask::from_bits(w, h, bits).unwrap();
            prop_assert_eq!(distance_transform(&m).values().to_vec(), brute_force(&m));
        }
    }
}
