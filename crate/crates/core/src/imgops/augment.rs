use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Largest shift per axis as a fraction of that axis' size.
    pub max_shift_fraction: f64,
    pub zoom_range: (f64, f64),
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig { max_shift_fraction: 0.10, zoom_range: (0.9, 1.1) }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.max_shift_fraction) {
            return Err(Error::config("max_shift_fraction must lie in [0, 0.5)"));
        }
        let (lo, hi) = self.zoom_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::config("zoom_range must be a positive interval"));
        }
        Ok(())
    }
}

/// Shift (pixels) and zoom about the image centre, applied identically to image and mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftZoom {
    pub dy: f64,
    pub dx: f64,
    pub zoom: f64,
}

impl ShiftZoom {
    pub const IDENTITY: ShiftZoom = ShiftZoom { dy: 0.0, dx: 0.0, zoom: 1.0 };

    pub fn draw<R: Rng + ?Sized>(rng: &mut R, cfg: &AugmentConfig, h: usize, w: usize) -> Self {
        let sy = cfg.max_shift_fraction * h as f64;
        let sx = cfg.max_shift_fraction * w as f64;
        let dy = if sy > 0.0 { rng.gen_range(-sy..=sy) } else { 0.0 };
        let dx = if sx > 0.0 { rng.gen_range(-sx..=sx) } else { 0.0 };
        let (lo, hi) = cfg.zoom_range;
        let zoom = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        ShiftZoom { dy, dx, zoom }
    }

    /// Source coordinate sampled by output coordinate `i` along an axis of length `n`.
    #[inline]
    fn source(&self, i: usize, n: usize, shift: f64) -> f64 {
        let c = (n as f64 - 1.0) / 2.0;
        c + (i as f64 - c) / self.zoom - shift
    }

    /// Bilinear resampling with reflect fill.
    pub fn apply_image<T: Real>(&self, img: &Array2<T>) -> Array2<T> {
        let (h, w) = img.dim();
        Array2::from_shape_fn((h, w), |(r, c)| {
            let y = reflect_coord(self.source(r, h, self.dy), h);
            let x = reflect_coord(self.source(c, w, self.dx), w);
            let (y0, x0) = (y.floor() as usize, x.floor() as usize);
            let (y1, x1) = ((y0 + 1).min(h - 1), (x0 + 1).min(w - 1));
            let (fy, fx) = (T::lit(y - y0 as f64), T::lit(x - x0 as f64));
            let top = img[[y0, x0]] + (img[[y0, x1]] - img[[y0, x0]]) * fx;
            let bottom = img[[y1, x0]] + (img[[y1, x1]] - img[[y1, x0]]) * fx;
            top + (bottom - top) * fy
        })
    }

    /// Nearest-neighbour resampling with zero fill.
    pub fn apply_mask(&self, mask: &Array2<u8>) -> Array2<u8> {
        let (h, w) = mask.dim();
        Array2::from_shape_fn((h, w), |(r, c)| {
            let y = (self.source(r, h, self.dy) + 0.5).floor();
            let x = (self.source(c, w, self.dx) + 0.5).floor();
            if y < 0.0 || x < 0.0 || y > (h - 1) as f64 || x > (w - 1) as f64 {
                0
            } else {
                mask[[y as usize, x as usize]]
            }
        })
    }
}

/// Reflects a continuous coordinate into `[0, n - 1]` (no edge repeat).
fn reflect_coord(v: f64, n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let period = 2.0 * (n - 1) as f64;
    let m = v.rem_euclid(period);
    if m > (n - 1) as f64 {
        period - m
    } else {
        m
    }
}

/// Draws one shift/zoom and applies it to a registered image/mask pair.
pub fn augment<T: Real, R: Rng + ?Sized>(
    image: &Array2<T>,
    mask: &Array2<u8>,
    rng: &mut R,
    cfg: &AugmentConfig,
) -> Result<(Array2<T>, Array2<u8>)> {
    if image.dim() != mask.dim() {
        let (a, b) = (image.dim(), mask.dim());
        return Err(Error::ShapeMismatch { left: vec![a.0, a.1], right: vec![b.0, b.1] });
    }
    if image.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (h, w) = image.dim();
    let t = ShiftZoom::draw(rng, cfg, h, w);
    Ok((t.apply_image(image), t.apply_mask(mask)))
}
