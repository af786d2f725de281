//! Scoring a manifest against OCR results, and the scores JSONL format.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use spellbench_core::ocr::{read_result, OcrResult};
use spellbench_core::prompts::ManifestRow;
use spellbench_core::scoring::{score_sample, IrregularVerbs, MatchOptions, ReadingOutcome, SampleScore};

use crate::error::{AppError, AppResult};
use crate::fsio;
use crate::manifest::{parse_jsonl, render_jsonl};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScoreSummary {
    pub scored: usize,
    /// Manifest rows without a target text (creative prompts with no quoted span).
    pub skipped_without_target: usize,
    pub missing_ocr: usize,
}

/// One score per manifest row with a target, in manifest order.
pub fn score_manifest(
    rows: &[ManifestRow],
    results: &BTreeMap<String, OcrResult>,
    verbs: &IrregularVerbs,
    options: MatchOptions,
) -> (Vec<SampleScore>, ScoreSummary) {
    let scored: Vec<Option<(SampleScore, bool)>> = rows
        .par_iter()
        .map(|row| {
            let target = row.target.as_deref()?;
            let result = results.get(&row.image_path);
            let reading;
            let outcome = match result {
                None => ReadingOutcome::Failed("no OCR result for this image"),
                Some(r) => match &r.error {
                    Some(e) => ReadingOutcome::Failed(e),
                    None => {
                        reading = read_result(r).reading;
                        ReadingOutcome::Reading(reading.as_deref())
                    }
                },
            };
            let s = score_sample(&row.prompt_id, row.sample_index, target, row.bucket, outcome, verbs, options);
            Some((s, result.is_none()))
        })
        .collect();
    let mut summary = ScoreSummary::default();
    let mut out = Vec::with_capacity(scored.len());
    for s in scored {
        match s {
            None => summary.skipped_without_target += 1,
            Some((s, missing)) => {
                summary.missing_ocr += usize::from(missing);
                out.push(s);
            }
        }
    }
    summary.scored = out.len();
    (out, summary)
}

pub fn write_scores(scores: &[SampleScore], path: &Path) -> AppResult<()> {
    fsio::write_atomic(path, &render_jsonl(scores)?)
}

pub fn read_scores(path: &Path) -> AppResult<Vec<SampleScore>> {
    parse_jsonl(&fsio::read_string(path)?, &format!("scores {}", path.display()))
}

/// A scores file tagged with a model name, written `NAME=PATH` on the
/// command line; a bare path uses its file stem as the name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelScores {
    pub model: String,
    pub path: PathBuf,
}

impl std::str::FromStr for ModelScores {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (model, path) = match s.split_once('=') {
            Some((m, p)) => (m.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(s);
                let stem = p
                    .file_stem()
                    .and_then(|x| x.to_str())
                    .ok_or_else(|| format!("cannot derive a model name from {s:?}; use NAME=PATH"))?;
                (stem.trim_end_matches(".scores").to_string(), p)
            }
        };
        if model.is_empty() || path.as_os_str().is_empty() {
            return Err(format!("expected NAME=PATH, got {s:?}"));
        }
        Ok(ModelScores { model, path })
    }
}

/// Loads every model's scores, rejecting repeated model names.
pub fn load_models(specs: &[ModelScores]) -> AppResult<BTreeMap<String, Vec<SampleScore>>> {
    let mut out = BTreeMap::new();
    for spec in specs {
        if out.insert(spec.model.clone(), read_scores(&spec.path)?).is_some() {
            return Err(AppError::user(format!("model {} given twice", spec.model)));
        }
    }
    Ok(out)
}

pub fn load_verbs(path: Option<&Path>) -> AppResult<IrregularVerbs> {
    match path {
        None => Ok(IrregularVerbs::default()),
        Some(p) => Ok(IrregularVerbs::parse(&fsio::read_string(p)?)?),
    }
}
