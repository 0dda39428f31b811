use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::phantom::Phantom;
use crate::scalar::Real;

use super::pulse::{pulse_half_width, pulse_waveform};
use super::AcousticConfig;

/// FWHM of a Gaussian divided by its sigma, `2 sqrt(2 ln 2)`.
const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Scatterers whose beam-sensitivity exponent exceeds this (weight below ~4e-6) are skipped.
const MAX_EXPONENT: f64 = 12.5;

/// Beam-space sampling lattice of an RF frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfGeometry {
    pub n_lines: usize,
    pub n_samples: usize,
    /// Lateral position of line 0, mm.
    pub first_line_x: f64,
    /// Distance between adjacent lines, mm.
    pub line_pitch: f64,
    /// Depth increment per sample (`c / (2 fs)`), mm.
    pub sample_depth: f64,
    /// Depth of sample 0, mm.
    pub first_sample_depth: f64,
}

impl RfGeometry {
    pub fn line_x(&self, line: usize) -> f64 {
        self.first_line_x + line as f64 * self.line_pitch
    }

    pub fn depth_at(&self, sample: usize) -> f64 {
        self.first_sample_depth + sample as f64 * self.sample_depth
    }
}

/// RF lines (`n_lines x n_samples`) sampled at the configured rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RfFrame<T> {
    pub samples: Array2<T>,
    pub config: AcousticConfig,
    pub first_line_x: f64,
    pub line_pitch: f64,
    pub t0: f64,
}

impl<T: Real> RfFrame<T> {
    pub fn n_lines(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.ncols()
    }

    pub fn geometry(&self) -> RfGeometry {
        RfGeometry {
            n_lines: self.n_lines(),
            n_samples: self.n_samples(),
            first_line_x: self.first_line_x,
            line_pitch: self.line_pitch,
            sample_depth: self.config.sample_depth_mm(),
            first_sample_depth: self.t0 * self.config.sound_speed / 2.0 * 1e3,
        }
    }
}

/// Lateral positions of the scan lines, uniformly spanning the phantom width.
pub fn line_positions(n_lines: usize, lateral_extent: f64) -> (f64, f64) {
    if n_lines <= 1 {
        (0.0, lateral_extent)
    } else {
        (-lateral_extent / 2.0, lateral_extent / (n_lines - 1) as f64)
    }
}

/// Number of samples per line: the round trip to the deepest scatterer plus one pulse length.
pub fn frame_length(cfg: &AcousticConfig, max_depth_mm: f64) -> usize {
    let round_trip = 2.0 * max_depth_mm * 1e-3 / cfg.sound_speed * cfg.sampling_frequency;
    round_trip.ceil() as usize + 2 * pulse_half_width(cfg) + 1
}

/// Precomputed per-scatterer terms that do not depend on the scan line.
struct Echo<T> {
    x: T,
    /// `y² + z²`, mm².
    yz2: T,
    /// Amplitude times elevational sensitivity and depth normalization.
    weight: T,
    /// `1 / (2 sigma_lat²)` at the scatterer's depth.
    lateral_k: T,
    /// Lateral distance beyond which the scatterer is skipped.
    reach: T,
}

/// Pulse-echo point-scatterer summation.
///
/// Each line sums, over scatterers, `amplitude * W_lat * W_elev * pulse(t - 2r/c)`
/// where `r` is the distance from the line's surface point. Beam sensitivities
/// are Gaussian with FWHM `lambda * F#` at the focus (phantom mid-depth), widening
/// by `1 + |z - z_f| / z_f`; the product is divided by that widening so that the
/// mean echo power does not depend on depth. Fractional delays are linearly
/// interpolated. Lines are computed independently and each sums its scatterers
/// in a fixed order, so the output does not depend on thread scheduling.
pub fn synthesize_rf<T: Real>(phantom: &Phantom<T>, cfg: &AcousticConfig) -> RfFrame<T> {
    let pc = &phantom.config;
    let (first_line_x, line_pitch) = line_positions(cfg.n_lines, pc.lateral_extent);
    let n_samples = frame_length(cfg, pc.standoff + pc.axial_extent);
    let pulse: Vec<T> = pulse_waveform(cfg);
    let half = pulse_half_width(cfg) as isize;

    let lambda_mm = cfg.sound_speed / cfg.center_frequency * 1e3;
    let focus = pc.mid_depth();
    let sigma_lat0 = lambda_mm * cfg.f_number / FWHM_PER_SIGMA;
    let sigma_elev0 = lambda_mm * cfg.elevation_f_number / FWHM_PER_SIGMA;

    let mut echoes: Vec<Echo<T>> = phantom
        .positions
        .iter()
        .zip(&phantom.amplitudes)
        .filter_map(|(p, &a)| {
            let (x, y, z) = (p[0], p[1], p[2]);
            let zf = z.to_f64_lossy();
            let widen = 1.0 + (zf - focus).abs() / focus;
            let sl = sigma_lat0 * widen;
            let se = sigma_elev0 * widen;
            let yf = y.to_f64_lossy();
            let elev_exp = yf * yf / (2.0 * se * se);
            if elev_exp > MAX_EXPONENT {
                return None;
            }
            let weight = a * T::lit((-elev_exp).exp() / widen);
            Some(Echo {
                x,
                yz2: y * y + z * z,
                weight,
                lateral_k: T::lit(1.0 / (2.0 * sl * sl)),
                reach: T::lit((2.0 * MAX_EXPONENT).sqrt() * sl),
            })
        })
        .collect();
    echoes.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal));
    let max_reach = echoes.iter().map(|e| e.reach).fold(T::zero(), T::max);

    let samples_per_mm = T::lit(2.0 * 1e-3 / cfg.sound_speed * cfg.sampling_frequency);
    let n_lines = cfg.n_lines;
    // Pulse with one zero on each side: taps j and j + 1 of `padded` are the two
    // pulse samples bracketing a fractional index.
    let mut padded = Vec::with_capacity(pulse.len() + 2);
    padded.push(T::zero());
    padded.extend_from_slice(&pulse);
    padded.push(T::zero());
    let taps = pulse.len() + 1;

    let lines: Vec<Vec<T>> = (0..n_lines)
        .into_par_iter()
        .map(|line| {
            let xl = T::lit(first_line_x + line as f64 * line_pitch);
            let mut out = vec![T::zero(); n_samples];
            let start = echoes.partition_point(|e| e.x < xl - max_reach);
            for e in echoes[start..].iter().take_while(|e| e.x <= xl + max_reach) {
                let dx = e.x - xl;
                if dx.abs() > e.reach {
                    continue;
                }
                let term = e.weight * (-(dx * dx) * e.lateral_k).exp();
                let delay = (dx * dx + e.yz2).sqrt() * samples_per_mm;
                let n0 = delay.floor();
                let frac = delay - n0;
                let keep = T::one() - frac;
                // Output sample n0 - half + j sees the pulse at fractional index
                // j - frac, between padded[j] (weight frac) and padded[j + 1] (weight 1 - frac).
                let first = n0.to_isize().unwrap_or(isize::MAX) - half;
                let lo = (-first).max(0) as usize;
                let hi = (n_samples as isize - first).clamp(0, taps as isize) as usize;
                if lo >= hi {
                    continue;
                }
                let base = (first + lo as isize) as usize;
                let dst = &mut out[base..base + (hi - lo)];
                for (j, d) in (lo..hi).zip(dst.iter_mut()) {
                    *d += term * (keep * padded[j + 1] + frac * padded[j]);
                }
            }
            out
        })
        .collect();

    let mut samples = Array2::zeros((n_lines, n_samples));
    for (mut row, line) in samples.rows_mut().into_iter().zip(lines) {
        row.assign(&ndarray::ArrayView1::from(&line));
    }
    RfFrame { samples, config: cfg.clone(), first_line_x, line_pitch, t0: 0.0 }
}
