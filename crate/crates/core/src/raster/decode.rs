use std::path::Path;

use image::{ImageFormat, ImageReader};

use super::BinaryMask;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: u8 = 127;

/// Integer luma, `(299 R + 587 G + 114 B) / 1000`.
#[inline]
pub fn rgb_to_luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32) / 1000) as u8
}

/// Thresholds a luma buffer: foreground iff `luma > threshold`.
pub fn binarize_luma(width: usize, height: usize, luma: &[u8], threshold: u8, name: &str) -> Result<BinaryMask> {
    BinaryMask::new(width, height, luma.iter().map(|&v| v > threshold).collect(), name)
}

/// Reads a PNG, JPEG or TIFF file and thresholds its luma.
pub fn decode_mask(path: &Path, threshold: u8) -> Result<BinaryMask> {
    let decode_err = |message: String| Error::Decode { path: path.to_path_buf(), message };
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg | ImageFormat::Tiff) => {}
        _ => return Err(Error::UnsupportedFormat { path: path.to_path_buf() }),
    }
    let img = reader.decode().map_err(|e| decode_err(e.to_string()))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    if w == 0 || h == 0 {
        return Err(decode_err("image has zero size".into()));
    }
    let luma: Vec<u8> = rgb.pixels().map(|p| rgb_to_luma(p[0], p[1], p[2])).collect();
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    binarize_luma(w, h, &luma, threshold, &name)
}
