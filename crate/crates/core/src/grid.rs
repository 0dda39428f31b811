//! Pixel grids shared by the B-mode image and the lesion mask.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular pixel lattice in the axial-lateral plane of the phantom.
///
/// Pixel `(row, col)` has its centre at
/// `(lateral, axial) = (origin_lateral + col * lateral_spacing, origin_axial + row * axial_spacing)`,
/// in millimetres. Axial positions are depths measured from the transducer face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub height: usize,
    pub width: usize,
    pub axial_spacing: f64,
    pub lateral_spacing: f64,
    pub origin_axial: f64,
    pub origin_lateral: f64,
}

impl ImageGrid {
    /// Grid whose corner pixel centres sit exactly on the given axial and lateral spans.
    pub fn spanning(
        height: usize,
        width: usize,
        axial: (f64, f64),
        lateral: (f64, f64),
    ) -> Result<Self> {
        if height < 2 || width < 2 {
            return Err(Error::config("a spanning grid needs at least 2x2 pixels"));
        }
        let grid = ImageGrid {
            height,
            width,
            axial_spacing: (axial.1 - axial.0) / (height - 1) as f64,
            lateral_spacing: (lateral.1 - lateral.0) / (width - 1) as f64,
            origin_axial: axial.0,
            origin_lateral: lateral.0,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 {
            return Err(Error::config("grid must have at least one pixel"));
        }
        if !(self.axial_spacing > 0.0 && self.lateral_spacing > 0.0) {
            return Err(Error::config("grid spacings must be > 0"));
        }
        if !(self.origin_axial.is_finite() && self.origin_lateral.is_finite()) {
            return Err(Error::config("grid origin must be finite"));
        }
        Ok(())
    }

    #[inline]
    pub fn axial_at(&self, row: usize) -> f64 {
        self.origin_axial + row as f64 * self.axial_spacing
    }

    #[inline]
    pub fn lateral_at(&self, col: usize) -> f64 {
        self.origin_lateral + col as f64 * self.lateral_spacing
    }

    pub fn last_axial(&self) -> f64 {
        self.axial_at(self.height - 1)
    }

    pub fn last_lateral(&self) -> f64 {
        self.lateral_at(self.width - 1)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }
}

/// Binary lesion mask registered to an [`ImageGrid`]; values are 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskImage {
    pub pixels: Array2<u8>,
    pub grid: ImageGrid,
}

impl MaskImage {
    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.iter().all(|&v| v == 0)
    }
}
