//! Prompt manifests: one JSON row per (prompt, sample) plus a metadata
//! sidecar.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spellbench_core::prompts::ManifestRow;

use crate::error::{AppError, AppResult, ResultExt};
use crate::fsio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestMeta {
    pub kind: String,
    pub n_prompts: usize,
    pub n_rows: usize,
    pub samples_per_prompt: usize,
    pub seed: Option<u64>,
    pub template: Option<String>,
    pub words_per_bucket: Option<usize>,
    pub source_split: Option<String>,
    pub inputs: BTreeMap<String, String>,
    pub toolkit_version: String,
}

pub fn meta_path(manifest: &Path) -> PathBuf {
    fsio::sidecar(manifest, ".meta.json")
}

pub fn render_jsonl<T: Serialize>(rows: &[T]) -> AppResult<Vec<u8>> {
    let mut out = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut out, r).internal_err("cannot serialize row")?;
        out.push(b'\n');
    }
    Ok(out)
}

/// Parses JSON Lines, naming the line of the first bad row. Blank lines are
/// ignored.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> AppResult<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).user_err(format!("{what} line {}", n + 1)))
        .collect()
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> AppResult<Vec<T>> {
    parse_jsonl(&fsio::read_string(path)?, &format!("{what} {}", path.display()))
}

pub fn write_manifest(rows: &[ManifestRow], meta: &ManifestMeta, path: &Path) -> AppResult<()> {
    fsio::write_atomic(path, &render_jsonl(rows)?)?;
    fsio::write_atomic(&meta_path(path), &fsio::to_json_pretty(meta)?)
}

pub fn read_manifest(path: &Path) -> AppResult<Vec<ManifestRow>> {
    let rows: Vec<ManifestRow> = read_jsonl(path, "manifest")?;
    let mut seen = std::collections::BTreeSet::new();
    for r in &rows {
        if !seen.insert(r.image_path.as_str()) {
            return Err(AppError::user(format!("manifest lists image {} twice", r.image_path)));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spellbench_core::wikispell::FrequencyBucket;

    #[test]
    fn row_shape() {
        let row = ManifestRow {
            prompt_id: "spell-0000-abcd1234".into(),
            sample_index: 0,
            prompt: "A sign with the word \"hi\" written on it.".into(),
            target: Some("hi".into()),
            bucket: Some(FrequencyBucket::P1to10),
            image_path: "images/spell-0000-abcd1234/0.png".into(),
        };
        let out = String::from_utf8(render_jsonl(std::slice::from_ref(&row)).unwrap()).unwrap();
        assert_eq!(
            out,
            "{\"prompt_id\":\"spell-0000-abcd1234\",\"sample_index\":0,\"prompt\":\"A sign with the word \\\"hi\\\" written on it.\",\"target\":\"hi\",\"bucket\":\"1-10\",\"image_path\":\"images/spell-0000-abcd1234/0.png\"}\n"
        );
        assert_eq!(parse_jsonl::<ManifestRow>(&out, "m").unwrap(), vec![row]);
        let err = parse_jsonl::<ManifestRow>("\n{\"prompt_id\":1}\n", "m").unwrap_err();
        assert!(err.to_string().contains("m line 2"), "{err}");
    }
}
