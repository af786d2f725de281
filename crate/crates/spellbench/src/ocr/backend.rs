//! OCR backends: a directory of precomputed responses, or an HTTP service.

use std::path::{Component, Path, PathBuf};
use std::thread;
use std::time::Duration;

use base64::Engine as _;
use rayon::prelude::*;
use serde::Deserialize;
use spellbench_core::ocr::{OcrBox, OcrResult};
use spellbench_core::prompts::ManifestRow;

use super::cloud::convert_cloud_response;
use super::{from_json_named, image::prepare_image, parse_ocr_json};
use crate::error::{AppError, AppResult};
use crate::fsio;

pub const DEFAULT_CREDENTIAL_ENV: &str = "OCR_CREDENTIAL";
pub const DEFAULT_CONCURRENCY: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ResponseFormat {
    /// The neutral schema.
    Neutral,
    /// Cloud text-detection responses (aggregate first, then words).
    Cloud,
}

/// Outcome of one image. `Err` is reserved for problems that must stop the
/// whole run, such as rejected credentials.
pub type Recognition = Result<OcrResult, AppError>;

pub trait OcrBackend: Sync {
    fn recognize(&self, row: &ManifestRow) -> Recognition;
}

/// Rejects absolute paths and `..` so manifest paths stay inside their root.
pub fn relative_path(image_path: &str) -> AppResult<PathBuf> {
    let p = Path::new(image_path);
    if p.components().all(|c| matches!(c, Component::Normal(_))) && !image_path.is_empty() {
        Ok(p.to_path_buf())
    } else {
        Err(AppError::user(format!("image path {image_path:?} must be relative and stay inside its root")))
    }
}

/// Responses stored as `<dir>/<image_path with .json extension>`.
pub struct PrecomputedBackend {
    pub dir: PathBuf,
    pub format: ResponseFormat,
}

impl PrecomputedBackend {
    pub fn response_path(&self, image_path: &str) -> AppResult<PathBuf> {
        Ok(self.dir.join(relative_path(image_path)?.with_extension("json")))
    }
}

impl OcrBackend for PrecomputedBackend {
    fn recognize(&self, row: &ManifestRow) -> Recognition {
        let id = row.image_path.as_str();
        let path = self.response_path(id)?;
        let backend = "precomputed";
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) => return Ok(OcrResult::failure(id, backend, format!("cannot read {}: {e}", path.display()))),
        };
        let parsed = match self.format {
            ResponseFormat::Neutral => parse_ocr_json(&bytes).map_err(|e| e.to_string()).and_then(|r| {
                if r.image_id == id {
                    Ok(r)
                } else {
                    Err(format!("response names image {:?}", r.image_id))
                }
            }),
            ResponseFormat::Cloud => convert_cloud_response(id, &bytes),
        };
        Ok(match parsed {
            Ok(mut r) => {
                r.raw_ref = Some(path.display().to_string());
                r
            }
            Err(e) => {
                let mut r = OcrResult::failure(id, backend, format!("{}: {e}", path.display()));
                r.raw_ref = Some(path.display().to_string());
                r
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub endpoint: String,
    pub credential: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub backoff: Duration,
    pub format: ResponseFormat,
    pub images_root: PathBuf,
    pub raw_dir: PathBuf,
}

/// Reads the credential from the environment, naming the variable when it
/// is missing.
pub fn credential_from_env(var: &str) -> AppResult<String> {
    match std::env::var(var) {
        Ok(v) if !v.trim().is_empty() => Ok(v.trim().to_string()),
        _ => Err(AppError::user(format!(
            "the HTTP OCR backend needs a credential in the environment variable {var}"
        ))),
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    agent: ureq::Agent,
}

/// Neutral-schema response body; the image id may be left out.
#[derive(Deserialize)]
struct NeutralResponse {
    #[serde(default)]
    backend: Option<String>,
    boxes: Vec<OcrBox>,
}

enum Attempt {
    Done(u16, Vec<u8>),
    Retry(String),
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpBackend { config, agent }
    }

    fn request_body(&self, png: &[u8]) -> (Vec<u8>, &'static str) {
        match self.config.format {
            ResponseFormat::Neutral => (png.to_vec(), "image/png"),
            ResponseFormat::Cloud => {
                let content = base64::engine::general_purpose::STANDARD.encode(png);
                let body = serde_json::json!({
                    "requests": [{"image": {"content": content}, "features": [{"type": "TEXT_DETECTION"}]}]
                });
                (body.to_string().into_bytes(), "application/json")
            }
        }
    }

    fn attempt(&self, id: &str, body: &[u8], content_type: &str) -> Attempt {
        let sent = self
            .agent
            .post(&self.config.endpoint)
            .header("Authorization", &format!("Bearer {}", self.config.credential))
            .header("X-Image-Id", id)
            .content_type(content_type)
            .send(body);
        match sent {
            Err(e) => Attempt::Retry(format!("transport error: {e}")),
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                match resp.body_mut().with_config().limit(64 << 20).read_to_vec() {
                    Ok(bytes) if status == 429 || status >= 500 => {
                        Attempt::Retry(format!("HTTP {status}: {}", String::from_utf8_lossy(&bytes).trim()))
                    }
                    Ok(bytes) => Attempt::Done(status, bytes),
                    Err(e) => Attempt::Retry(format!("HTTP {status}, body unreadable: {e}")),
                }
            }
        }
    }

    fn persist_raw(&self, id: &str, bytes: &[u8]) -> AppResult<String> {
        let path = self.config.raw_dir.join(relative_path(id)?.with_extension("json"));
        fsio::write_atomic(&path, bytes)?;
        Ok(path.display().to_string())
    }

    fn parse(&self, id: &str, bytes: &[u8]) -> Result<OcrResult, String> {
        match self.config.format {
            ResponseFormat::Cloud => convert_cloud_response(id, bytes),
            ResponseFormat::Neutral => {
                let r: NeutralResponse = from_json_named(bytes)?;
                let result = OcrResult {
                    image_id: id.to_string(),
                    backend: r.backend.unwrap_or_else(|| "http".into()),
                    boxes: r.boxes,
                    raw_ref: None,
                    error: None,
                };
                result.validate().map_err(|e| e.to_string())?;
                Ok(result)
            }
        }
    }
}

impl OcrBackend for HttpBackend {
    fn recognize(&self, row: &ManifestRow) -> Recognition {
        let id = row.image_path.as_str();
        let image = self.config.images_root.join(relative_path(id)?);
        let png = match prepare_image(&image) {
            Ok(p) => p,
            Err(e) => return Ok(OcrResult::failure(id, "http", e)),
        };
        let (body, content_type) = self.request_body(&png);
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                let wait = self.config.backoff.saturating_mul(1 << (attempt - 1).min(16)).min(Duration::from_secs(60));
                log::warn!("{id}: {last}; retry {attempt}/{} in {wait:?}", self.config.max_retries);
                thread::sleep(wait);
            }
            match self.attempt(id, &body, content_type) {
                Attempt::Retry(why) => last = why,
                Attempt::Done(401 | 403, bytes) => {
                    return Err(AppError::user(format!(
                        "OCR endpoint rejected the credential: {}",
                        String::from_utf8_lossy(&bytes).trim()
                    )))
                }
                Attempt::Done(status, bytes) => {
                    if attempt > 0 {
                        log::info!("{id}: succeeded after {attempt} retries");
                    }
                    let raw_ref = self.persist_raw(id, &bytes)?;
                    let mut result = if (200..300).contains(&status) {
                        self.parse(id, &bytes)
                            .unwrap_or_else(|e| OcrResult::failure(id, "http", format!("unparseable response: {e}")))
                    } else {
                        OcrResult::failure(id, "http", format!("HTTP {status}"))
                    };
                    result.raw_ref = Some(raw_ref);
                    return Ok(result);
                }
            }
        }
        log::error!("{id}: giving up after {} retries: {last}", self.config.max_retries);
        Ok(OcrResult::failure(
            id,
            "http",
            format!("retries exhausted after {} attempts: {last}", self.config.max_retries + 1),
        ))
    }
}

/// Runs the backend over the manifest with at most `concurrency` requests
/// in flight. Results come back in manifest order.
pub fn run_ocr(rows: &[ManifestRow], backend: &dyn OcrBackend, concurrency: usize) -> AppResult<Vec<OcrResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
        .map_err(|e| AppError::internal(format!("cannot start OCR workers: {e}")))?;
    pool.install(|| rows.par_iter().map(|r| backend.recognize(r)).collect())
}
