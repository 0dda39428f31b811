use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Source coordinate of output index `i` under corner-aligned sampling.
#[inline]
fn corner_aligned(i: usize, n_in: usize, n_out: usize) -> f64 {
    if n_out <= 1 || n_in <= 1 {
        0.0
    } else {
        i as f64 * (n_in - 1) as f64 / (n_out - 1) as f64
    }
}

/// Bilinear resize with corner-aligned sampling (output corners hit input corners).
pub fn resize_bilinear<T: Real>(img: &Array2<T>, out_h: usize, out_w: usize) -> Result<Array2<T>> {
    let (h, w) = img.dim();
    if h == 0 || w == 0 || out_h == 0 || out_w == 0 {
        return Err(Error::EmptyInput);
    }
    let taps = |n_in: usize, n_out: usize| -> Vec<(usize, usize, T)> {
        (0..n_out)
            .map(|i| {
                let v = corner_aligned(i, n_in, n_out);
                let i0 = (v.floor() as usize).min(n_in - 1);
                let i1 = (i0 + 1).min(n_in - 1);
                (i0, i1, T::lit(v - i0 as f64))
            })
            .collect()
    };
    let rows = taps(h, out_h);
    let cols = taps(w, out_w);
    Ok(Array2::from_shape_fn((out_h, out_w), |(r, c)| {
        let (r0, r1, fr) = rows[r];
        let (c0, c1, fc) = cols[c];
        let top = img[[r0, c0]] + (img[[r0, c1]] - img[[r0, c0]]) * fc;
        let bottom = img[[r1, c0]] + (img[[r1, c1]] - img[[r1, c0]]) * fc;
        top + (bottom - top) * fr
    }))
}

/// Nearest-neighbour resize with the same corner-aligned coordinates; used for masks.
pub fn resize_nearest<V: Copy + Default>(img: &Array2<V>, out_h: usize, out_w: usize) -> Result<Array2<V>> {
    let (h, w) = img.dim();
    if h == 0 || w == 0 || out_h == 0 || out_w == 0 {
        return Err(Error::EmptyInput);
    }
    let pick = |i: usize, n_in: usize, n_out: usize| {
        (corner_aligned(i, n_in, n_out) + 0.5).floor().min((n_in - 1) as f64) as usize
    };
    let rows: Vec<usize> = (0..out_h).map(|r| pick(r, h, out_h)).collect();
    let cols: Vec<usize> = (0..out_w).map(|c| pick(c, w, out_w)).collect();
    Ok(Array2::from_shape_fn((out_h, out_w), |(r, c)| img[[rows[r], cols[c]]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn in_vivo_size_to_network_size() {
        let img = Array2::from_shape_fn((570, 760), |(r, c)| (r + c) as f64);
        let out = resize_bilinear(&img, 388, 388).unwrap();
        assert_eq!(out.dim(), (388, 388));
        assert_eq!(out[[0, 0]], img[[0, 0]]);
        assert_eq!(out[[387, 387]], img[[569, 759]]);
    }

    #[test]
    fn same_size_is_identity() {
        let img = Array2::from_shape_fn((388, 388), |(r, c)| ((r * 3 + c * 5) % 17) as f64 / 16.0);
        assert_eq!(resize_bilinear(&img, 388, 388).unwrap(), img);
        assert_eq!(resize_nearest(&img, 388, 388).unwrap(), img);
    }

    #[test]
    fn constant_stays_constant() {
        let img = Array2::from_elem((37, 91), 0.25f64);
        let out = resize_bilinear(&img, 100, 13).unwrap();
        assert!(out.iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn linear_ramp_is_reproduced() {
        let img = Array2::from_shape_fn((11, 21), |(r, c)| r as f64 * 2.0 + c as f64);
        let out = resize_bilinear(&img, 21, 41).unwrap();
        for ((r, c), &v) in out.indexed_iter() {
            let expected = r as f64 * 0.5 * 2.0 + c as f64 * 0.5;
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_input_rejected() {
        let img = Array2::<f64>::zeros((0, 5));
        assert!(matches!(resize_bilinear(&img, 4, 4), Err(Error::EmptyInput)));
    }
}
