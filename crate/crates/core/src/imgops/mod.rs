//! Image-space operations shared by dataset generation, training and evaluation.

mod augment;
mod metric;
mod pad;
mod resize;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use augment::{augment, AugmentConfig, ShiftZoom};
pub use metric::{binarize_argmax, dice, mean_std, soft_dice_loss, soft_dice_loss_grad, SOFT_DICE_EPS};
pub use pad::{mirror_pad, mirror_pad_1d};
pub use resize::{resize_bilinear, resize_nearest};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spatial size of the network output (and of evaluation masks).
pub const NET_OUTPUT_SIZE: usize = 388;
/// Mirror padding added on every side of the resized image.
pub const MIRROR_PAD: usize = 92;
/// Spatial size of the network input.
pub const NET_INPUT_SIZE: usize = NET_OUTPUT_SIZE + 2 * MIRROR_PAD;

/// How intensities are mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Per-image `(v - min) / (max - min)`.
    #[default]
    MinMax,
    /// `v / divisor`, clamped to `[0, 1]`.
    Fixed(f64),
}

/// Per-image min-max normalization; a constant image maps to zeros.
pub fn normalize01<T: Real>(img: &Array2<T>) -> Array2<T> {
    let (lo, hi) = img
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return Array2::zeros(img.dim());
    }
    let range = hi - lo;
    img.mapv(|v| (v - lo) / range)
}

pub fn normalize<T: Real>(img: &Array2<T>, mode: Normalization) -> Array2<T> {
    match mode {
        Normalization::MinMax => normalize01(img),
        Normalization::Fixed(d) => {
            let d = T::lit(d);
            img.mapv(|v| (v / d).max(T::zero()).min(T::one()))
        }
    }
}

/// Network-ready image and (optionally) its mask.
#[derive(Debug, Clone, PartialEq)]
pub struct NetInputPair<T> {
    /// `572 x 572`, values in `[0, 1]`.
    pub image: Array2<T>,
    /// `388 x 388`, values in `{0, 1}`.
    pub mask: Option<Array2<u8>>,
}

/// Resize to 388x388, mirror-pad by 92 to 572x572 and normalize.
pub fn preprocess_image<T: Real>(img: &Array2<T>, mode: Normalization) -> Result<Array2<T>> {
    let resized = resize_bilinear(img, NET_OUTPUT_SIZE, NET_OUTPUT_SIZE)?;
    let padded = mirror_pad(&resized, MIRROR_PAD)?;
    Ok(normalize(&padded, mode))
}

/// Nearest-neighbour resize of a mask to the network output size; nonzero becomes 1.
pub fn preprocess_mask(mask: &Array2<u8>) -> Result<Array2<u8>> {
    Ok(resize_nearest(mask, NET_OUTPUT_SIZE, NET_OUTPUT_SIZE)?.mapv(|v| u8::from(v != 0)))
}

pub fn preprocess_pair<T: Real>(
    img: &Array2<T>,
    mask: Option<&Array2<u8>>,
    mode: Normalization,
) -> Result<NetInputPair<T>> {
    if let Some(m) = mask {
        if m.dim() != img.dim() {
            let (a, b) = (img.dim(), m.dim());
            return Err(Error::ShapeMismatch { left: vec![a.0, a.1], right: vec![b.0, b.1] });
        }
    }
    Ok(NetInputPair {
        image: preprocess_image(img, mode)?,
        mask: mask.map(preprocess_mask).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        let out = normalize01(&array![[0.0, 127.5, 255.0]]);
        assert_eq!(out, array![[0.0, 0.5, 1.0]]);
        assert!(normalize01(&Array2::from_elem((3, 3), 42.0)).iter().all(|&v| v == 0.0));
        let fixed = normalize(&array![[0.0f64, 51.0, 255.0]], Normalization::Fixed(255.0));
        assert_eq!(fixed, array![[0.0, 0.2, 1.0]]);
    }

    #[test]
    fn net_sizes() {
        assert_eq!(NET_INPUT_SIZE, 572);
    }

    proptest! {
        #[test]
        fn normalized_range(v in proptest::collection::vec(-1e3f64..1e3, 2..64)) {
            let n = v.len();
            let img = Array2::from_shape_vec((1, n), v).unwrap();
            let out = normalize01(&img);
            let lo = out.iter().cloned().fold(f64::MAX, f64::min);
            let hi = out.iter().cloned().fold(f64::MIN, f64::max);
            if img.iter().any(|&x| x != img[[0, 0]]) {
                prop_assert_eq!(lo, 0.0);
                prop_assert_eq!(hi, 1.0);
            }
        }

        #[test]
        fn preprocessing_shapes(h in 2usize..120, w in 2usize..120, seed in 0u64..1000) {
            let img = Array2::from_shape_fn((h, w), |(r, c)| ((r * 31 + c * 17 + seed as usize) % 251) as f32);
            let mask = img.mapv(|v| u8::from(v > 120.0));
            let pair = preprocess_pair(&img, Some(&mask), Normalization::MinMax).unwrap();
            prop_assert_eq!(pair.image.dim(), (572, 572));
            prop_assert!(pair.image.iter().all(|&v| (0.0..=1.0).contains(&v)));
            let m = pair.mask.unwrap();
            prop_assert_eq!(m.dim(), (388, 388));
            prop_assert!(m.iter().all(|&v| v <= 1));
        }
    }
}
