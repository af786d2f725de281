//! WikiSpell dataset directory.
//!
//! `train.tsv`, `dev.tsv`, `test.tsv` hold `word<TAB>spelling` sorted by
//! word. `assignments.tsv` lists every lexicon word with its frequency, rank,
//! bucket and split (`-` when absent), ordered by rank. `metadata.json`
//! records the sampling settings and counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use spellbench_core::wikispell::{DatasetMetadata, FrequencyBucket, Split, WikiSpellDataset};

use crate::error::{AppError, AppResult};
use crate::fsio;

pub const ASSIGNMENTS_FILE: &str = "assignments.tsv";
pub const METADATA_FILE: &str = "metadata.json";

pub fn split_file(split: Split) -> &'static str {
    match split {
        Split::Train => "train.tsv",
        Split::Dev => "dev.tsv",
        Split::Test => "test.tsv",
    }
}

#[derive(Serialize)]
struct MetadataFile<'a> {
    #[serde(flatten)]
    metadata: &'a DatasetMetadata,
    inputs: &'a BTreeMap<String, String>,
}

/// File name to contents, in a fixed order.
pub fn render_dataset(ds: &WikiSpellDataset, inputs: &BTreeMap<String, String>) -> AppResult<Vec<(&'static str, Vec<u8>)>> {
    let mut files = Vec::new();
    let mut split_of: BTreeMap<&str, Split> = BTreeMap::new();
    for split in Split::ALL {
        let mut body = String::new();
        // examples are already sorted by (split, word)
        for e in ds.split(split) {
            writeln!(body, "{}\t{}", e.word, e.spelling).unwrap();
            split_of.insert(&e.word, split);
        }
        files.push((split_file(split), body.into_bytes()));
    }
    let mut assignments = String::from("word\tfrequency\trank\tbucket\tsplit\n");
    for row in &ds.bucketed.rows {
        let bucket = row.bucket.map_or("-", FrequencyBucket::as_str);
        let split = split_of.get(row.word.as_str()).map_or("-", |s| s.as_str());
        writeln!(assignments, "{}\t{}\t{}\t{bucket}\t{split}", row.word, row.frequency, row.rank).unwrap();
    }
    files.push((ASSIGNMENTS_FILE, assignments.into_bytes()));
    files.push((
        METADATA_FILE,
        fsio::to_json_pretty(&MetadataFile {
            metadata: &ds.metadata,
            inputs,
        })?,
    ));
    Ok(files)
}

pub fn write_dataset(ds: &WikiSpellDataset, inputs: &BTreeMap<String, String>, dir: &Path) -> AppResult<()> {
    fsio::create_dir(dir)?;
    for (name, bytes) in render_dataset(ds, inputs)? {
        fsio::write_atomic(&dir.join(name), &bytes)?;
    }
    Ok(())
}

/// Words of one split grouped by bucket, read back from `assignments.tsv`.
pub fn read_split_words(dir: &Path, split: Split) -> AppResult<BTreeMap<FrequencyBucket, Vec<String>>> {
    let path = dir.join(ASSIGNMENTS_FILE);
    let text = fsio::read_string(&path)?;
    let mut out: BTreeMap<FrequencyBucket, Vec<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = || AppError::user(format!("{} line {}: malformed assignment row", path.display(), n + 1));
        if cols.len() != 5 {
            return Err(bad());
        }
        if cols[4] != split.as_str() {
            continue;
        }
        let bucket = FrequencyBucket::parse(cols[3]).ok_or_else(bad)?;
        out.entry(bucket).or_default().push(cols[0].to_string());
    }
    Ok(out)
}
