use ndarray::{Array2, ArrayView3, Dimension};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smoothing constant of the soft Dice loss.
pub const SOFT_DICE_EPS: f64 = 1.0;

fn check_same_shape<D: Dimension>(a: &D, b: &D) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch { left: a.slice().to_vec(), right: b.slice().to_vec() });
    }
    Ok(())
}

/// Foreground mask from a two-channel `(H, W, [background, foreground])` map.
/// Ties go to background.
pub fn binarize_argmax<T: Real>(prob: ArrayView3<'_, T>) -> Result<Array2<u8>> {
    let (h, w, c) = prob.dim();
    if c != 2 {
        return Err(Error::ShapeMismatch { left: vec![h, w, c], right: vec![h, w, 2] });
    }
    Ok(Array2::from_shape_fn((h, w), |(r, col)| u8::from(prob[[r, col, 1]] > prob[[r, col, 0]])))
}

/// Dice similarity `2|G ∩ P| / (|G| + |P|)`; nonzero pixels are foreground.
/// Two empty masks score 1.
pub fn dice(truth: &Array2<u8>, pred: &Array2<u8>) -> Result<f64> {
    check_same_shape(&truth.raw_dim(), &pred.raw_dim())?;
    let (mut inter, mut total) = (0u64, 0u64);
    for (&g, &p) in truth.iter().zip(pred.iter()) {
        let (g, p) = (u64::from(g != 0), u64::from(p != 0));
        inter += g & p;
        total += g + p;
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / total as f64)
}

fn soft_dice_sums<T: Real>(prob_fg: &Array2<T>, truth: &Array2<u8>) -> Result<(T, T)> {
    check_same_shape(&prob_fg.raw_dim(), &truth.raw_dim())?;
    let (mut inter, mut total) = (T::zero(), T::zero());
    for (&p, &g) in prob_fg.iter().zip(truth.iter()) {
        let g = if g != 0 { T::one() } else { T::zero() };
        inter += p * g;
        total += p + g;
    }
    Ok((inter, total))
}

/// `1 - (2 sum(p g) + eps) / (sum p + sum g + eps)` with `eps = 1`.
pub fn soft_dice_loss<T: Real>(prob_fg: &Array2<T>, truth: &Array2<u8>) -> Result<T> {
    let (inter, total) = soft_dice_sums(prob_fg, truth)?;
    let eps = T::lit(SOFT_DICE_EPS);
    Ok(T::one() - (T::lit(2.0) * inter + eps) / (total + eps))
}

/// Gradient of [`soft_dice_loss`] with respect to each foreground probability.
pub fn soft_dice_loss_grad<T: Real>(prob_fg: &Array2<T>, truth: &Array2<u8>) -> Result<Array2<T>> {
    let (inter, total) = soft_dice_sums(prob_fg, truth)?;
    let eps = T::lit(SOFT_DICE_EPS);
    let num = T::lit(2.0) * inter + eps;
    let den = total + eps;
    let den2 = den * den;
    Ok(truth.mapv(|g| {
        let g = if g != 0 { T::one() } else { T::zero() };
        -(T::lit(2.0) * g * den - num) / den2
    }))
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array3};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn argmax_rules() {
        let prob = Array3::from_shape_vec((1, 3, 2), vec![0.3, 0.7, 0.5, 0.5, 0.6, 0.4]).unwrap();
        assert_eq!(binarize_argmax(prob.view()).unwrap(), array![[1u8, 0, 0]]);
        let bad = Array3::<f64>::zeros((2, 2, 3));
        assert!(binarize_argmax(bad.view()).is_err());
    }

    #[test]
    fn dice_examples() {
        let g = array![[1u8, 1, 0, 0], [1, 1, 0, 0]];
        assert_eq!(dice(&g, &g).unwrap(), 1.0);
        let disjoint = array![[0u8, 0, 1, 1], [0, 0, 1, 1]];
        assert_eq!(dice(&g, &disjoint).unwrap(), 0.0);
        let half = array![[0u8, 1, 1, 0], [0, 1, 1, 0]];
        assert_eq!(dice(&g, &half).unwrap(), 0.5);
        let empty = Array2::<u8>::zeros((2, 4));
        assert_eq!(dice(&empty, &empty).unwrap(), 1.0);
        assert_eq!(dice(&g, &empty).unwrap(), 0.0);
        assert!(matches!(dice(&g, &Array2::zeros((4, 2))), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn soft_dice_examples() {
        let g = array![[1u8, 0]];
        assert_eq!(soft_dice_loss(&array![[1.0, 0.0]], &g).unwrap(), 0.0);
        let l: f64 = soft_dice_loss(&array![[0.0, 1.0]], &g).unwrap();
        assert!((l - 2.0 / 3.0).abs() < 1e-15);
        let z = Array2::<u8>::zeros((3, 3));
        assert_eq!(soft_dice_loss(&Array2::<f64>::zeros((3, 3)), &z).unwrap(), 0.0);
    }

    #[test]
    fn soft_dice_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let p: Array2<f64> = Array2::from_shape_fn((8, 8), |_| rng.gen_range(0.05..0.95));
            let g = Array2::from_shape_fn((8, 8), |_| u8::from(rng.gen_bool(0.4)));
            let grad = soft_dice_loss_grad(&p, &g).unwrap();
            let h = 1e-6;
            for idx in [(0, 0), (3, 5), (7, 7), (4, 1)] {
                let (mut up, mut down) = (p.clone(), p.clone());
                up[idx] += h;
                down[idx] -= h;
                let fd = (soft_dice_loss(&up, &g).unwrap() - soft_dice_loss(&down, &g).unwrap()) / (2.0 * h);
                let rel = (fd - grad[idx]).abs() / grad[idx].abs().max(1e-12);
                assert!(rel < 1e-5, "rel err {rel}");
            }
        }
    }

    #[test]
    fn population_std() {
        let (m, s) = mean_std(&[1.0, 0.0, 0.5]);
        assert!((m - 0.5).abs() < 1e-15);
        assert!((s - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn dice_symmetric_and_bounded(a in proptest::collection::vec(0u8..2, 64), b in proptest::collection::vec(0u8..2, 64)) {
            let a = Array2::from_shape_vec((8, 8), a).unwrap();
            let b = Array2::from_shape_vec((8, 8), b).unwrap();
            let ab = dice(&a, &b).unwrap();
            prop_assert_eq!(ab, dice(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn soft_dice_in_unit_interval(p in proptest::collection::vec(0.0f64..=1.0, 16), g in proptest::collection::vec(0u8..2, 16)) {
            let p = Array2::from_shape_vec((4, 4), p).unwrap();
            let g = Array2::from_shape_vec((4, 4), g).unwrap();
            let l = soft_dice_loss(&p, &g).unwrap();
            prop_assert!((0.0..1.0).contains(&l));
        }
    }
}
