//! Per-run metadata, written beside the primary output as `<out>.run.json`.
//!
//! The data outputs themselves never embed run ids or wall-clock times, so
//! they stay byte-identical across runs; this sidecar is where those go.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use spellbench_core::TOOLKIT_VERSION;

use crate::error::AppResult;
use crate::fsio;

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub run_id: String,
    pub command: String,
    pub toolkit_version: String,
    pub seed: Option<u64>,
    pub workers: usize,
    pub config_file: Option<String>,
    pub effective_config: serde_json::Value,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
    pub wall_clock_secs: f64,
    pub summary: serde_json::Value,
}

pub struct RunClock {
    started: Instant,
    started_at: String,
}

impl RunClock {
    pub fn start() -> Self {
        RunClock {
            started: Instant::now(),
            started_at: now_rfc3339(),
        }
    }
}

pub fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn checksums(paths: &[PathBuf]) -> AppResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for p in paths {
        if p.is_file() {
            out.insert(p.display().to_string(), fsio::sha256_file(p)?);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn finish(
    clock: RunClock,
    command: &str,
    seed: Option<u64>,
    workers: usize,
    config_file: Option<&Path>,
    effective_config: serde_json::Value,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
    summary: serde_json::Value,
) -> AppResult<RunMeta> {
    Ok(RunMeta {
        run_id: uuid::Uuid::new_v4().to_string(),
        command: command.to_string(),
        toolkit_version: TOOLKIT_VERSION.to_string(),
        seed,
        workers,
        config_file: config_file.map(|p| p.display().to_string()),
        effective_config,
        inputs: checksums(inputs)?,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        started_at: clock.started_at,
        finished_at: now_rfc3339(),
        wall_clock_secs: clock.started.elapsed().as_secs_f64(),
        summary,
    })
}
