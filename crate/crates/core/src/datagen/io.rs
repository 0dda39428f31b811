//! 8-bit PNG images and masks. Masks are `{0, 255}` on disk and `{0, 1}` in memory.

use std::path::Path;

use image::{GrayImage, ImageReader};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn image_err(path: &Path, source: image::ImageError) -> Error {
    Error::Image { path: path.to_path_buf(), source }
}

pub fn open_image(path: &Path) -> Result<image::DynamicImage> {
    ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| image_err(path, e))
}

fn gray_to_array(img: &GrayImage) -> Array2<u8> {
    let (w, h) = img.dimensions();
    Array2::from_shape_vec((h as usize, w as usize), img.as_raw().clone())
        .expect("buffer matches dimensions")
}

/// Reads any supported image as 8-bit luma.
pub fn read_gray(path: &Path) -> Result<Array2<u8>> {
    Ok(gray_to_array(&open_image(path)?.to_luma8()))
}

/// Reads a mask; every nonzero pixel becomes 1.
pub fn read_mask(path: &Path) -> Result<Array2<u8>> {
    Ok(read_gray(path)?.mapv(|v| u8::from(v != 0)))
}

pub fn write_gray(path: &Path, pixels: &Array2<u8>) -> Result<()> {
    let (h, w) = pixels.dim();
    let buf: Vec<u8> = pixels.iter().copied().collect();
    let img = GrayImage::from_raw(w as u32, h as u32, buf).expect("buffer matches dimensions");
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| image_err(path, e))
}

/// Writes a `{0, 1}` mask as `{0, 255}`.
pub fn write_mask(path: &Path, mask: &Array2<u8>) -> Result<()> {
    write_gray(path, &mask.mapv(|v| if v != 0 { 255 } else { 0 }))
}

/// Quantizes `[0, 1]` intensities to 8 bits.
pub fn quantize<T: Real>(img: &Array2<T>) -> Array2<u8> {
    img.mapv(|v| {
        let v = v.to_f64_lossy().clamp(0.0, 1.0);
        (v * 255.0).round() as u8
    })
}
