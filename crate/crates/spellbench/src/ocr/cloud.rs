//! Converter for cloud text-detection responses.
//!
//! The common response shape lists text annotations where the first entry is
//! the whole detected text and the rest are individual words or blocks. The
//! aggregate is dropped so the top-most rule compares like with like. Vertex
//! coordinates equal to zero may be omitted by the service and default to 0.

use serde::Deserialize;
use spellbench_core::ocr::{OcrBox, OcrResult, Vertex};

use super::from_json_named;

pub const CLOUD_BACKEND: &str = "cloud-text-detection";

#[derive(Debug, Deserialize)]
struct Envelope {
    #[serde(default)]
    responses: Option<Vec<Response>>,
    #[serde(flatten)]
    single: Response,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Response {
    #[serde(default)]
    text_annotations: Vec<Annotation>,
    #[serde(default)]
    error: Option<Status>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Annotation {
    #[serde(default)]
    description: String,
    bounding_poly: Poly,
}

#[derive(Debug, Deserialize)]
struct Poly {
    #[serde(default)]
    vertices: Vec<CloudVertex>,
}

#[derive(Debug, Deserialize)]
struct CloudVertex {
    #[serde(default)]
    x: f64,
    #[serde(default)]
    y: f64,
}

#[derive(Debug, Deserialize)]
struct Status {
    #[serde(default)]
    code: i64,
    #[serde(default)]
    message: String,
}

/// Converts a raw response for `image_id`. A response that carries an error
/// status becomes a failure record; a response that cannot be parsed is an
/// `Err` naming the offending field.
pub fn convert_cloud_response(image_id: &str, bytes: &[u8]) -> Result<OcrResult, String> {
    let env: Envelope = from_json_named(bytes)?;
    let resp = match env.responses {
        Some(mut list) => {
            if list.len() != 1 {
                return Err(format!("expected exactly one response, found {}", list.len()));
            }
            list.pop().unwrap_or_default()
        }
        None => env.single,
    };
    if let Some(status) = resp.error {
        return Ok(OcrResult::failure(
            image_id,
            CLOUD_BACKEND,
            format!("backend error {}: {}", status.code, status.message),
        ));
    }
    let boxes = resp
        .text_annotations
        .into_iter()
        .skip(1)
        .map(|a| OcrBox {
            text: a.description,
            polygon: a.bounding_poly.vertices.into_iter().map(|v| Vertex { x: v.x, y: v.y }).collect(),
        })
        .collect();
    let result = OcrResult {
        image_id: image_id.to_string(),
        backend: CLOUD_BACKEND.to_string(),
        boxes,
        raw_ref: None,
        error: None,
    };
    result.validate().map_err(|e| e.to_string())?;
    Ok(result)
}
