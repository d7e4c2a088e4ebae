use image::RgbImage;

use super::{TermId, TermVector};
use crate::error::{Error, Result};

/// 4 bits per channel, a 4096-colour vocabulary.
pub const DEFAULT_BITS: u8 = 4;

/// Colour bag of an RGB frame: each pixel becomes the term
/// `(R>>s)<<2b | (G>>s)<<b | (B>>s)` with `s = 8 - b`, weighted by pixel count.
pub fn quantize_frame(frame: &RgbImage, bits: u8) -> Result<TermVector> {
    quantize_rgb(frame.as_raw(), bits)
}

/// Same as [`quantize_frame`] over packed `RGBRGB...` bytes.
pub fn quantize_rgb(rgb: &[u8], bits: u8) -> Result<TermVector> {
    if !(1..=8).contains(&bits) {
        return Err(Error::invalid(format!(
            "bits per channel {bits} not in 1..=8"
        )));
    }
    if rgb.is_empty() {
        return Err(Error::EmptyRaster);
    }
    if !rgb.len().is_multiple_of(3) {
        return Err(Error::invalid("raster length is not a multiple of 3"));
    }
    let shift = 8 - bits as u32;
    let b = bits as u32;
    Ok(TermVector::from_counts(rgb.chunks_exact(3).map(|px| {
        let (r, g, bl) = (px[0] as TermId, px[1] as TermId, px[2] as TermId);
        ((r >> shift) << (2 * b)) | ((g >> shift) << b) | (bl >> shift)
    })))
}
