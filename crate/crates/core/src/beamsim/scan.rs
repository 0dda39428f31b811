use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::scalar::Real;

use super::{BModeImage, RfGeometry};

const SNAP: f64 = 1e-9;

/// Continuous lattice coordinate, snapped onto integers that it misses only by
/// rounding noise so lattice-aligned grids reproduce the input exactly.
fn lattice_coord(value: f64, n: usize, what: &str) -> Result<f64> {
    let max = (n - 1) as f64;
    let snapped = if (value - value.round()).abs() < SNAP { value.round() } else { value };
    if !(snapped >= 0.0 && snapped <= max) {
        return Err(Error::GridOutOfBounds(format!(
            "{what} coordinate {value:.6} outside [0, {max}]"
        )));
    }
    Ok(snapped)
}

/// Bilinear resampling of a `(line, sample)` frame onto `grid`.
pub fn scan_convert<T: Real>(
    compressed: &Array2<T>,
    geometry: &RfGeometry,
    grid: &ImageGrid,
) -> Result<BModeImage<T>> {
    grid.validate()?;
    let (n_lines, n_samples) = compressed.dim();
    if n_lines == 0 || n_samples == 0 {
        return Err(Error::EmptyInput);
    }
    let line_coord = |x: f64| {
        if n_lines == 1 {
            let off = (x - geometry.first_line_x).abs();
            lattice_coord(if off < SNAP { 0.0 } else { f64::INFINITY }, 1, "line")
        } else {
            lattice_coord((x - geometry.first_line_x) / geometry.line_pitch, n_lines, "line")
        }
    };
    let cols: Vec<f64> = (0..grid.width)
        .map(|c| line_coord(grid.lateral_at(c)))
        .collect::<Result<_>>()?;
    let rows: Vec<f64> = (0..grid.height)
        .map(|r| {
            let v = (grid.axial_at(r) - geometry.first_sample_depth) / geometry.sample_depth;
            lattice_coord(v, n_samples, "sample")
        })
        .collect::<Result<_>>()?;

    let split = |v: f64, n: usize| {
        let i0 = (v.floor() as usize).min(n - 1);
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, T::lit(v - i0 as f64))
    };
    let pixels = Array2::from_shape_fn(grid.shape(), |(r, c)| {
        let (l0, l1, fl) = split(cols[c], n_lines);
        let (s0, s1, fs) = split(rows[r], n_samples);
        let top = compressed[[l0, s0]] * (T::one() - fl) + compressed[[l1, s0]] * fl;
        let bottom = compressed[[l0, s1]] * (T::one() - fl) + compressed[[l1, s1]] * fl;
        let v = top * (T::one() - fs) + bottom * fs;
        v.max(T::zero()).min(T::one())
    });
    Ok(BModeImage { pixels, grid: *grid })
}
