//! Mask decoding, preprocessing, connected-component labeling and boundary tracing.

mod contour;
mod decode;
mod label;
mod morphology;

pub use contour::{trace_contours, trace_region_boundary, Contour, PixelPos};
pub use decode::{binarize_luma, decode_mask, rgb_to_luma, DEFAULT_THRESHOLD};
pub use label::{label_components, largest_region, LabeledMask};
pub use morphology::{
    gaussian_blur_then_rebinarize, morphological_close, preprocess, DEFAULT_CLOSE_RADIUS, DEFAULT_SIGMA,
};

use crate::error::{Error, Result};

/// Two-valued raster; `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
    source_name: String,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>, source_name: impl Into<String>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!("mask dimensions must be positive, got {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer length {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels, source_name: source_name.into() })
    }

    /// Builds a mask by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, pixels, source_name: String::new() }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn foreground_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }
}
