//! Image decoding and the fixed 64x64 rescale applied before OCR.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};
use spellbench_core::ocr::{preprocess_raster, Raster};

/// Decoded image as an 8-bit RGB raster.
pub fn decode(bytes: &[u8]) -> Result<Raster, String> {
    let img = image::load_from_memory(bytes).map_err(|e| format!("cannot decode image: {e}"))?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    Raster::new(w, h, 3, rgb.into_raw()).map_err(|e| e.to_string())
}

pub fn encode_png(raster: &Raster) -> Result<Vec<u8>, String> {
    if raster.channels != 3 {
        return Err(format!("expected an RGB raster, got {} channels", raster.channels));
    }
    let img = RgbImage::from_raw(raster.width, raster.height, raster.data.clone())
        .ok_or_else(|| "raster buffer does not match its size".to_string())?;
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).map_err(|e| format!("cannot encode PNG: {e}"))?;
    Ok(out.into_inner())
}

/// Reads, decodes and rescales one image file, returning PNG bytes ready
/// for submission.
pub fn prepare_image(path: &Path) -> Result<Vec<u8>, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let raster = decode(&bytes)?;
    let small = preprocess_raster(&raster).map_err(|e| e.to_string())?;
    encode_png(&small)
}
