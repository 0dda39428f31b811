use crate::scalar::Real;

use super::AcousticConfig;

/// `sqrt(2 ln 2)`: half-width at half-maximum of a unit-sigma Gaussian.
const HWHM_PER_SIGMA: f64 = 1.177_410_022_515_474_6;

/// Temporal standard deviation (seconds) of the Gaussian pulse envelope whose
/// amplitude spectrum is 6 dB down at `fc * (1 +- bw/2)`.
pub fn envelope_sigma(cfg: &AcousticConfig) -> f64 {
    HWHM_PER_SIGMA / (std::f64::consts::PI * cfg.fractional_bandwidth * cfg.center_frequency)
}

/// Samples on each side of the pulse centre (`floor(3 sigma fs)`).
pub fn pulse_half_width(cfg: &AcousticConfig) -> usize {
    (3.0 * envelope_sigma(cfg) * cfg.sampling_frequency).floor() as usize
}

/// Gaussian-enveloped cosine at the centre frequency, truncated at +-3 sigma,
/// with unit peak at index [`pulse_half_width`].
pub fn pulse_waveform<T: Real>(cfg: &AcousticConfig) -> Vec<T> {
    let sigma = envelope_sigma(cfg);
    let half = pulse_half_width(cfg) as isize;
    let w = 2.0 * std::f64::consts::PI * cfg.center_frequency;
    (-half..=half)
        .map(|k| {
            let t = k as f64 / cfg.sampling_frequency;
            T::lit((-t * t / (2.0 * sigma * sigma)).exp() * (w * t).cos())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Magnitude spectrum by direct summation, zero-padded to `n` points.
    fn dft_magnitude(x: &[f64], n: usize) -> Vec<f64> {
        (0..n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let ph = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                    re += v * ph.cos();
                    im += v * ph.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    fn support_above(p: &[f64], frac: f64) -> usize {
        let first = p.iter().position(|v| v.abs() >= frac).unwrap();
        let last = p.iter().rposition(|v| v.abs() >= frac).unwrap();
        last - first + 1
    }

    #[test]
    fn unit_peak_at_centre() {
        let cfg = AcousticConfig::default();
        let p: Vec<f64> = pulse_waveform(&cfg);
        let half = pulse_half_width(&cfg);
        assert_eq!(p.len(), 2 * half + 1);
        assert_eq!(p[half], 1.0);
        assert!(p.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn spectrum_peaks_at_centre_frequency() {
        let cfg = AcousticConfig::default();
        let p: Vec<f64> = pulse_waveform(&cfg);
        let n = 4096;
        let mag = dft_magnitude(&p, n);
        let peak = mag
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let bin_hz = cfg.sampling_frequency / n as f64;
        let expected = (cfg.center_frequency / bin_hz).round() as isize;
        assert!((peak as isize - expected).abs() <= 1, "peak bin {peak}, expected {expected}");
    }

    #[test]
    fn minus_six_db_width_matches_bandwidth() {
        let cfg = AcousticConfig::default();
        let p: Vec<f64> = pulse_waveform(&cfg);
        let n = 8192;
        let mag = dft_magnitude(&p, n);
        let max = mag.iter().cloned().fold(0.0, f64::max);
        let above: Vec<usize> = (0..mag.len()).filter(|&k| mag[k] >= max / 2.0).collect();
        let bin_hz = cfg.sampling_frequency / n as f64;
        let width = (above[above.len() - 1] - above[0]) as f64 * bin_hz;
        let target = cfg.fractional_bandwidth * cfg.center_frequency;
        assert!((width - target).abs() / target < 0.02, "width {width}");
    }

    #[test]
    fn doubling_bandwidth_halves_support() {
        let cfg = AcousticConfig::default();
        let wide = AcousticConfig { fractional_bandwidth: 2.0 * cfg.fractional_bandwidth, ..cfg.clone() };
        let a = support_above(&pulse_waveform::<f64>(&cfg), 0.01) as f64;
        let b = support_above(&pulse_waveform::<f64>(&wide), 0.01) as f64;
        let ratio = a / b;
        assert!((ratio - 2.0).abs() / 2.0 < 0.2, "ratio {ratio}");
    }
}
