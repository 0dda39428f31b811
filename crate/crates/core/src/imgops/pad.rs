use ndarray::Array2;

use crate::error::{Error, Result};

/// Reflect index `i` (which may be out of range by less than `n`) into `0..n`
/// without repeating the edge sample.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let r = if i < 0 {
        -i
    } else if i >= n {
        2 * (n - 1) - i
    } else {
        i
    };
    r as usize
}

/// U-Net style mirror padding: `[1, 2, 3]` padded by 1 becomes `[2, 1, 2, 3, 2]`.
pub fn mirror_pad<V: Copy>(img: &Array2<V>, pad: usize) -> Result<Array2<V>> {
    let (h, w) = img.dim();
    if pad >= h.min(w) {
        return Err(Error::PadTooLarge { pad, h, w });
    }
    let p = pad as isize;
    Ok(Array2::from_shape_fn((h + 2 * pad, w + 2 * pad), |(r, c)| {
        img[[reflect(r as isize - p, h), reflect(c as isize - p, w)]]
    }))
}

/// One-dimensional analogue of [`mirror_pad`].
pub fn mirror_pad_1d<V: Copy>(v: &[V], pad: usize) -> Result<Vec<V>> {
    if pad >= v.len() {
        return Err(Error::PadTooLarge { pad, h: 1, w: v.len() });
    }
    let p = pad as isize;
    Ok((0..v.len() + 2 * pad).map(|i| v[reflect(i as isize - p, v.len())]).collect())
}
