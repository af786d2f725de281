//! OCR results on disk, backends that produce them, and image preparation.
//!
//! The neutral schema is one JSON object per image:
//! `{"image_id": str, "backend": str, "boxes": [{"text": str, "polygon": [{"x": num, "y": num}, ...]}]}`.

pub mod backend;
pub mod cloud;
pub mod image;

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use spellbench_core::ocr::{read_result, OcrResult};

use crate::error::{AppError, AppResult};
use crate::fsio;
use crate::manifest::render_jsonl;

/// Deserializes JSON, reporting the path of the offending field
/// (`boxes[0].polygon[2].x: invalid type ...`, `missing field image_id`).
pub fn from_json_named<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        // serde's "missing field `x` at line 1 column 9" becomes "missing field x"
        let msg = match msg.strip_prefix("missing field `").and_then(|m| m.split_once('`')) {
            Some((field, _)) => format!("missing field {field}"),
            None => msg,
        };
        if path == "." {
            msg
        } else {
            format!("{path}: {msg}")
        }
    })
}

/// Parses one neutral-schema result and checks its invariants.
pub fn parse_ocr_json(bytes: &[u8]) -> AppResult<OcrResult> {
    let result: OcrResult = from_json_named(bytes).map_err(AppError::user)?;
    result.validate()?;
    Ok(result)
}

pub fn render_ocr_json(result: &OcrResult) -> AppResult<Vec<u8>> {
    fsio::to_json_pretty(result)
}

pub fn parse_ocr_jsonl(text: &str) -> AppResult<Vec<OcrResult>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_ocr_json(line.as_bytes()).map_err(|e| e.context(format!("OCR results line {}", n + 1)))?);
    }
    Ok(out)
}

pub fn read_ocr_jsonl(path: &Path) -> AppResult<Vec<OcrResult>> {
    parse_ocr_jsonl(&fsio::read_string(path)?).map_err(|e| e.context(format!("in {}", path.display())))
}

pub fn write_ocr_jsonl(results: &[OcrResult], path: &Path) -> AppResult<()> {
    fsio::write_atomic(path, &render_jsonl(results)?)
}

/// Results keyed by image id; a repeated id is an input error.
pub fn index_results(results: Vec<OcrResult>) -> AppResult<BTreeMap<String, OcrResult>> {
    let mut map = BTreeMap::new();
    for r in results {
        if let Some(prev) = map.insert(r.image_id.clone(), r) {
            return Err(AppError::user(format!("duplicate OCR result for {}", prev.image_id)));
        }
    }
    Ok(map)
}

/// How many images ended with a reading, with no text, or with a failure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct OcrTally {
    pub reading: usize,
    pub no_text: usize,
    pub pipeline_error: usize,
}

impl OcrTally {
    pub fn of(results: &[OcrResult]) -> Self {
        let mut t = OcrTally::default();
        for r in results {
            if r.error.is_some() {
                t.pipeline_error += 1;
            } else if read_result(r).reading.is_some() {
                t.reading += 1;
            } else {
                t.no_text += 1;
            }
        }
        t
    }

    pub fn total(&self) -> usize {
        self.reading + self.no_text + self.pipeline_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let r = parse_ocr_json(br#"{"image_id":"a","boxes":[]}"#).unwrap();
        assert!(r.boxes.is_empty());
        assert_eq!(r.backend, "");

        let r = parse_ocr_json(
            br#"{"image_id":"b","backend":"x","boxes":[{"text":"HI\nTHERE","polygon":[{"x":0,"y":0},{"x":4,"y":0},{"x":4,"y":2},{"x":0,"y":2}]}]}"#,
        )
        .unwrap();
        assert_eq!(r.boxes[0].text, "HI\nTHERE");
        assert_eq!(r.boxes[0].polygon.len(), 4);
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse_ocr_json(br#"{"boxes":[]}"#).unwrap_err().to_string();
        assert_eq!(e, "missing field image_id");
        let e = parse_ocr_json(br#"{"image_id":"a","boxes":[{"text":5,"polygon":[]}]}"#)
            .unwrap_err()
            .to_string();
        assert!(e.starts_with("boxes[0].text:"), "{e}");
        let e = parse_ocr_json(br#"{"image_id":"a","boxes":[{"polygon":[]}]}"#).unwrap_err().to_string();
        assert!(e.contains("missing field text"), "{e}");
        let e = parse_ocr_json(br#"{"image_id":"a","boxes":[{"text":"","polygon":[{"x":1,"y":1}]}]}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("boxes[0].polygon"), "{e}");
    }
}
