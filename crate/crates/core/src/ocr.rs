//! OCR result types, reading selection and normalization, and the fixed-size
//! raster rescale applied before recognition.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Side length images are rescaled to before OCR.
pub const OCR_INPUT_SIZE: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrBox {
    pub text: String,
    pub polygon: Vec<Vertex>,
}

impl OcrBox {
    pub fn min_y(&self) -> f64 {
        self.polygon.iter().map(|v| v.y).fold(f64::INFINITY, f64::min)
    }

    pub fn min_x(&self) -> f64 {
        self.polygon.iter().map(|v| v.x).fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> core::result::Result<(), String> {
        if self.polygon.len() < 3 {
            return Err(format!("polygon has {} vertices, need at least 3", self.polygon.len()));
        }
        for (i, v) in self.polygon.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite()) || v.x < 0.0 || v.y < 0.0 {
                return Err(format!("vertex {i} ({}, {}) is not finite and non-negative", v.x, v.y));
            }
        }
        Ok(())
    }
}

/// OCR output for one image.
///
/// `error` is set when the backend failed for this image; such results score
/// as pipeline errors rather than as "no text".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrResult {
    pub image_id: String,
    #[serde(default)]
    pub backend: String,
    pub boxes: Vec<OcrBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl OcrResult {
    pub fn failure(image_id: impl Into<String>, backend: impl Into<String>, error: impl Into<String>) -> Self {
        OcrResult {
            image_id: image_id.into(),
            backend: backend.into(),
            boxes: Vec::new(),
            raw_ref: None,
            error: Some(error.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.image_id.is_empty() {
            return Err(Error::Malformed("image_id must not be empty".into()));
        }
        for (i, b) in self.boxes.iter().enumerate() {
            b.validate()
                .map_err(|e| Error::Malformed(format!("boxes[{i}].polygon: {e}")))?;
        }
        Ok(())
    }
}

/// Index and box with the smallest top edge (minimum vertex y); ties go to
/// the smaller left edge, then to the earlier box.
pub fn select_topmost(result: &OcrResult) -> Option<(usize, &OcrBox)> {
    result.boxes.iter().enumerate().min_by(|(ia, a), (ib, b)| {
        a.min_y()
            .total_cmp(&b.min_y())
            .then_with(|| a.min_x().total_cmp(&b.min_x()))
            .then_with(|| ia.cmp(ib))
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedReading {
    pub reading: Option<String>,
    pub source_box_index: Option<usize>,
}

/// Deletes carriage returns and line feeds, then trims edge whitespace.
/// An empty result counts as no text.
pub fn normalize_text(text: &str) -> Option<String> {
    let joined: String = text.chars().filter(|&c| c != '\n' && c != '\r').collect();
    let trimmed = joined.trim();
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_string())
    }
}

pub fn normalize_reading(ocr_box: Option<&OcrBox>) -> Option<String> {
    ocr_box.and_then(|b| normalize_text(&b.text))
}

/// The reading used for scoring: the top-most box, normalized.
pub fn read_result(result: &OcrResult) -> NormalizedReading {
    match select_topmost(result) {
        None => NormalizedReading::default(),
        Some((i, b)) => match normalize_reading(Some(b)) {
            None => NormalizedReading::default(),
            Some(r) => NormalizedReading {
                reading: Some(r),
                source_box_index: Some(i),
            },
        },
    }
}

/// Interleaved 8-bit raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::Precondition("raster must be non-empty".into()));
        }
        let want = width as usize * height as usize * channels as usize;
        if data.len() != want {
            return Err(Error::Precondition(format!("raster buffer holds {} bytes, expected {want}", data.len())));
        }
        Ok(Raster { width, height, channels, data })
    }

    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Self {
        Raster {
            width,
            height,
            channels,
            data: vec![value; width as usize * height as usize * channels as usize],
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.channels as usize;
        let at = (y as usize * self.width as usize + x as usize) * c;
        &self.data[at..at + c]
    }
}

/// Source sample position for destination index `d`, as an integer part and
/// a fraction over `2 * dst`. Pixel centres are aligned
/// (`src = (d + 0.5) * src_len / dst_len - 0.5`, clamped to the edge).
fn source_coord(d: u32, src: u32, dst: u32) -> (u32, u32, u64) {
    let denom = 2 * dst as i64;
    let num = (2 * d as i64 + 1) * src as i64 - dst as i64;
    if num <= 0 {
        return (0, 0, 0);
    }
    let i0 = (num / denom) as u32;
    let frac = (num % denom) as u64;
    if i0 >= src - 1 {
        return (src - 1, src - 1, 0);
    }
    (i0, i0 + 1, frac)
}

/// Bilinear rescale to exactly `width` x `height`; aspect ratio is not kept.
/// Integer arithmetic throughout, rounding half up, so output is
/// bit-identical on every platform.
pub fn resize_bilinear(src: &Raster, width: u32, height: u32) -> Result<Raster> {
    if width == 0 || height == 0 {
        return Err(Error::Precondition("target size must be non-zero".into()));
    }
    let c = src.channels as usize;
    let dx = 2 * width as u64;
    let dy = 2 * height as u64;
    let scale = dx * dy;
    let xs: Vec<(u32, u32, u64)> = (0..width).map(|x| source_coord(x, src.width, width)).collect();
    let mut data = Vec::with_capacity(width as usize * height as usize * c);
    for y in 0..height {
        let (y0, y1, fy) = source_coord(y, src.height, height);
        for &(x0, x1, fx) in &xs {
            let p00 = src.pixel(x0, y0);
            let p10 = src.pixel(x1, y0);
            let p01 = src.pixel(x0, y1);
            let p11 = src.pixel(x1, y1);
            for k in 0..c {
                let v = p00[k] as u64 * (dx - fx) * (dy - fy)
                    + p10[k] as u64 * fx * (dy - fy)
                    + p01[k] as u64 * (dx - fx) * fy
                    + p11[k] as u64 * fx * fy;
                data.push(((v + scale / 2) / scale) as u8);
            }
        }
    }
    Ok(Raster {
        width,
        height,
        channels: src.channels,
        data,
    })
}

/// Rescale applied to every image before OCR.
pub fn preprocess_raster(src: &Raster) -> Result<Raster> {
    resize_bilinear(src, OCR_INPUT_SIZE, OCR_INPUT_SIZE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(text: &str, x: f64, y: f64) -> OcrBox {
        OcrBox {
            text: text.into(),
            polygon: vec![
                Vertex { x, y },
                Vertex { x: x + 10.0, y },
                Vertex { x: x + 10.0, y: y + 5.0 },
                Vertex { x, y: y + 5.0 },
            ],
        }
    }

    fn result(boxes: Vec<OcrBox>) -> OcrResult {
        OcrResult {
            image_id: "img".into(),
            backend: "test".into(),
            boxes,
            raw_ref: None,
            error: None,
        }
    }

    #[test]
    fn topmost_rules() {
        let r = result(vec![rect("low", 0.0, 50.0), rect("high", 0.0, 10.0)]);
        assert_eq!(select_topmost(&r).unwrap().0, 1);
        let r = result(vec![rect("right", 30.0, 10.0), rect("left", 5.0, 10.0)]);
        assert_eq!(select_topmost(&r).unwrap().0, 1);
        let r = result(vec![rect("first", 5.0, 10.0), rect("second", 5.0, 10.0)]);
        assert_eq!(select_topmost(&r).unwrap().0, 0);
        assert!(select_topmost(&result(vec![])).is_none());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_text("KILOPAS\nCALS").as_deref(), Some("KILOPASCALS"));
        assert_eq!(normalize_text("  stop  ").as_deref(), Some("stop"));
        assert_eq!(normalize_text("A\r\nB\n").as_deref(), Some("AB"));
        assert_eq!(normalize_text(" \n "), None);
        assert_eq!(normalize_reading(None), None);
    }

    #[test]
    fn read_result_tracks_box() {
        let r = result(vec![rect("LOW", 0.0, 40.0), rect("HI\nGH ", 0.0, 2.0)]);
        let n = read_result(&r);
        assert_eq!(n.reading.as_deref(), Some("HIGH"));
        assert_eq!(n.source_box_index, Some(1));
    }

    #[test]
    fn validation_catches_bad_polygons() {
        let mut b = rect("x", 0.0, 0.0);
        b.polygon.truncate(2);
        assert!(result(vec![b]).validate().is_err());
        let mut b = rect("x", 0.0, 0.0);
        b.polygon[0].x = -1.0;
        assert!(result(vec![b]).validate().is_err());
        let mut r = result(vec![]);
        r.image_id.clear();
        assert!(r.validate().is_err());
    }

    #[test]
    fn resize_dimensions_identity_and_constant() {
        let wide = Raster::filled(128, 64, 3, 10);
        let out = preprocess_raster(&wide).unwrap();
        assert_eq!((out.width, out.height, out.data.len()), (64, 64, 64 * 64 * 3));

        let data: Vec<u8> = (0..64 * 64).map(|i| (i * 7 % 251) as u8).collect();
        let img = Raster::new(64, 64, 1, data).unwrap();
        assert_eq!(preprocess_raster(&img).unwrap(), img);

        let gray = Raster::filled(200, 100, 1, 137);
        assert!(preprocess_raster(&gray).unwrap().data.iter().all(|&v| v == 137));
    }

    #[test]
    fn resize_halving_averages_pairs() {
        let img = Raster::new(4, 1, 1, vec![0, 100, 200, 250]).unwrap();
        let out = resize_bilinear(&img, 2, 1).unwrap();
        assert_eq!(out.data, vec![50, 225]);
    }
}
