//! Pulse-echo B-mode simulation: phantom -> RF -> envelope -> log compression -> scan conversion.

mod compress;
mod dump;
mod envelope;
mod pulse;
mod rf;
mod scan;
mod stats;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use compress::log_compress;
pub use dump::{read_rf_dump, write_rf_dump, RfDumpHeader, RF_HEADER_LEN, RF_MAGIC};
pub use envelope::envelope_detect;
pub use pulse::{envelope_sigma, pulse_half_width, pulse_waveform};
pub use rf::{frame_length, line_positions, synthesize_rf, RfFrame, RfGeometry};
pub use scan::scan_convert;
pub use stats::{lesion_free_region, point_snr};

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, MaskImage};
use crate::phantom::{generate_phantom, rasterize_mask, LesionSpec, Phantom, PhantomConfig};
use crate::scalar::Real;

/// Default image size (rows x columns) of simulated B-mode frames.
pub const DEFAULT_IMAGE_SHAPE: (usize, usize) = (512, 340);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcousticConfig {
    pub n_lines: usize,
    /// Hz.
    pub center_frequency: f64,
    /// Hz.
    pub sampling_frequency: f64,
    /// m/s.
    pub sound_speed: f64,
    /// -6 dB bandwidth relative to the centre frequency.
    pub fractional_bandwidth: f64,
    /// Lateral f-number; sets the lateral beam FWHM `lambda * F#` at focus.
    pub f_number: f64,
    /// Elevational f-number of the fixed lens focus.
    pub elevation_f_number: f64,
    pub dynamic_range_db: f64,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        AcousticConfig {
            n_lines: 50,
            center_frequency: 3.5e6,
            sampling_frequency: 100e6,
            sound_speed: 1540.0,
            fractional_bandwidth: 0.6,
            f_number: 2.0,
            elevation_f_number: 14.0,
            dynamic_range_db: 60.0,
        }
    }
}

impl AcousticConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("center_frequency", self.center_frequency),
            ("sound_speed", self.sound_speed),
            ("fractional_bandwidth", self.fractional_bandwidth),
            ("f_number", self.f_number),
            ("elevation_f_number", self.elevation_f_number),
            ("dynamic_range_db", self.dynamic_range_db),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be > 0")));
            }
        }
        if self.n_lines == 0 {
            return Err(Error::config("n_lines must be >= 1"));
        }
        if !(self.sampling_frequency > 2.0 * self.center_frequency) {
            return Err(Error::config("sampling_frequency must exceed twice the centre frequency"));
        }
        Ok(())
    }

    /// Depth covered by one RF sample, mm.
    pub fn sample_depth_mm(&self) -> f64 {
        self.sound_speed / (2.0 * self.sampling_frequency) * 1e3
    }
}

/// Log-compressed, scan-converted image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BModeImage<T> {
    pub pixels: Array2<T>,
    pub grid: ImageGrid,
}

/// Default pixel grid covering the phantom's axial and lateral extent.
pub fn default_grid(phantom: &PhantomConfig) -> ImageGrid {
    let (h, w) = DEFAULT_IMAGE_SHAPE;
    ImageGrid::spanning(
        h,
        w,
        (phantom.standoff, phantom.standoff + phantom.axial_extent),
        (-phantom.lateral_extent / 2.0, phantom.lateral_extent / 2.0),
    )
    .expect("phantom config is validated")
}

/// Intermediate products of one simulated acquisition.
#[derive(Debug, Clone)]
pub struct Acquisition<T> {
    pub rf: RfFrame<T>,
    pub envelope: Array2<T>,
    pub image: BModeImage<T>,
}

/// Runs the imaging chain on an existing phantom.
pub fn image_phantom<T: Real>(
    phantom: &Phantom<T>,
    acoustic: &AcousticConfig,
    grid: &ImageGrid,
) -> Result<Acquisition<T>> {
    acoustic.validate()?;
    let rf = synthesize_rf(phantom, acoustic);
    let envelope = envelope_detect(&rf.samples);
    let compressed = log_compress(&envelope, acoustic.dynamic_range_db);
    let image = scan_convert(&compressed, &rf.geometry(), grid)?;
    Ok(Acquisition { rf, envelope, image })
}

/// Registered B-mode image, ground-truth mask and the lesions behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedImage<T> {
    pub image: BModeImage<T>,
    pub mask: MaskImage,
    pub lesions: Vec<LesionSpec>,
}

/// Simulates one image from a seed: random phantom, imaging chain and mask on the same grid.
pub fn simulate_image<T: Real>(
    seed: u64,
    phantom_cfg: &PhantomConfig,
    acoustic: &AcousticConfig,
    grid: &ImageGrid,
) -> Result<SimulatedImage<T>> {
    phantom_cfg.validate()?;
    acoustic.validate()?;
    grid.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phantom: Phantom<T> = generate_phantom(&mut rng, phantom_cfg)?;
    let acq = image_phantom(&phantom, acoustic, grid)?;
    let mask = rasterize_mask(&phantom.lesions, grid);
    Ok(SimulatedImage { image: acq.image, mask, lesions: phantom.lesions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(AcousticConfig::default().validate().is_ok());
        let bad = AcousticConfig { sampling_frequency: 6e6, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = AcousticConfig { n_lines: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = AcousticConfig { dynamic_range_db: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_grid_spacing() {
        let g = default_grid(&PhantomConfig::default());
        assert_eq!(g.shape(), (512, 340));
        assert!((g.axial_spacing - 60.0 / 511.0).abs() < 1e-12);
        assert!((g.last_lateral() - 20.0).abs() < 1e-9);
    }
}
