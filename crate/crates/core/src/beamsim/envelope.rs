use ndarray::{Array2, Axis};
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

/// Magnitude of the analytic signal of each row, via the FFT Hilbert transform.
pub fn envelope_detect<T: Real>(rf: &Array2<T>) -> Array2<T> {
    let (rows, n) = rf.dim();
    let mut out = Array2::zeros((rows, n));
    if n == 0 {
        return out;
    }
    // Zero-padding to a 2^a 3^b 5^c length keeps the transform fast for any frame length.
    let len = smooth_length(n);
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    let two = T::lit(2.0);
    let scale = T::one() / T::lit(len as f64);

    let lines: Vec<Vec<T>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let mut buf: Vec<Complex<T>> = rf.row(r).iter().map(|&v| Complex::new(v, T::zero())).collect();
            buf.resize(len, Complex::zero());
            forward.process(&mut buf);
            // Keep DC (and Nyquist for even n), double positive frequencies, zero negative ones.
            for c in buf.iter_mut().take(len.div_ceil(2)).skip(1) {
                *c *= two;
            }
            for c in buf.iter_mut().skip(len / 2 + 1) {
                *c = Complex::zero();
            }
            inverse.process(&mut buf);
            buf.iter().take(n).map(|c| c.norm() * scale).collect()
        })
        .collect();
    for (mut dst, line) in out.axis_iter_mut(Axis(0)).zip(lines) {
        dst.assign(&ndarray::ArrayView1::from(&line));
    }
    out
}

/// Smallest `2^a 3^b 5^c >= n`.
fn smooth_length(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut m = p35;
            while m < n {
                m *= 2;
            }
            best = best.min(m);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn windowed_cosine_envelope_is_its_amplitude() {
        let (fs, fc, a) = (100e6, 3.5e6, 2.5);
        let n = 4000;
        let line: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                // Tukey-like taper keeps edge leakage out of the interior.
                let edge = (i.min(n - 1 - i) as f64 / 400.0).min(1.0);
                let w = 0.5 - 0.5 * (std::f64::consts::PI * edge).cos();
                a * w * (2.0 * std::f64::consts::PI * fc * t).cos()
            })
            .collect();
        let rf = Array2::from_shape_vec((1, n), line).unwrap();
        let env = envelope_detect(&rf);
        for i in 800..n - 800 {
            assert!((env[[0, i]] - a).abs() / a < 0.02, "sample {i}: {}", env[[0, i]]);
        }
    }

    #[test]
    fn smooth_lengths() {
        assert_eq!(smooth_length(1), 1);
        assert_eq!(smooth_length(11796), 12000);
        assert_eq!(smooth_length(1025), 1080);
        for n in 1..2000 {
            let m = smooth_length(n);
            let mut r = m;
            for p in [2, 3, 5] {
                while r.is_multiple_of(p) {
                    r /= p;
                }
            }
            assert!(m >= n && r == 1);
        }
    }

    #[test]
    fn zero_line_has_zero_envelope() {
        let rf = Array2::<f64>::zeros((3, 257));
        assert!(envelope_detect(&rf).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negation_does_not_change_envelope() {
        let rf = Array2::from_shape_fn((2, 301), |(r, i)| ((i * 7 + r * 13) % 17) as f64 - 8.0);
        let neg = rf.mapv(|v| -v);
        assert_eq!(envelope_detect(&rf), envelope_detect(&neg));
    }

    #[test]
    fn odd_length_and_f32() {
        let rf = Array2::from_shape_fn((1, 255), |(_, i)| (i as f32 * 0.7).sin());
        let env = envelope_detect(&rf);
        assert!(env.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
