//! Sharded frequency counting and the frequency-table TSV format.
//!
//! A table file starts with a fixed block of nine `#key<TAB>value` lines
//! followed by `word<TAB>count` rows, most frequent first and ties by word.
//! Because the header has a fixed length, words that start with `#` are
//! never mistaken for header lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use spellbench_core::corpus_stats::{
    count_delimited, merge_tables, CountingMode, FrequencyTable, LangConfig, Provenance, SubstringCounter,
};

use crate::docs::SkippedDoc;
use crate::error::{AppError, AppResult};
use crate::fsio;

pub const TABLE_MAGIC: &str = "#spellbench-frequency-table";
pub const TABLE_FORMAT_VERSION: &str = "1";
const HEADER_KEYS: [&str; 8] = [
    "language",
    "counting_mode",
    "docs_processed",
    "corpus_id",
    "doc_limit",
    "created",
    "skipped_docs",
    "toolkit_version",
];

/// Documents handed to the worker pool at a time.
pub const DEFAULT_BATCH_DOCS: usize = 8192;

#[derive(Debug, Clone)]
pub struct CountJob {
    pub config: LangConfig,
    pub corpus_id: String,
    pub created: String,
    /// Candidate words; required for substring counting.
    pub words: Option<BTreeSet<String>>,
    /// Number of shards each batch is split into.
    pub shards: usize,
    pub batch_docs: usize,
}

/// Counts a document stream. Each batch is cut into `shards` contiguous
/// pieces counted in parallel and then merged; the merge is a pointwise sum,
/// so the table does not depend on the shard count.
pub fn count_documents<I>(docs: I, job: &CountJob) -> AppResult<FrequencyTable>
where
    I: IntoIterator<Item = Result<String, SkippedDoc>>,
{
    job.config.validate()?;
    let mut shard_config = job.config.clone();
    shard_config.doc_limit = None;
    let provenance = || Provenance::new(job.corpus_id.clone(), job.config.doc_limit, job.created.clone());
    let substring = match job.config.counting_mode {
        CountingMode::Delimited => None,
        CountingMode::DocSubstring => {
            let words = job
                .words
                .as_ref()
                .ok_or_else(|| AppError::user("substring counting needs a candidate word list (--words)"))?;
            Some(SubstringCounter::new(words, &shard_config)?)
        }
    };
    let count_shard = |shard: &[Result<String, SkippedDoc>]| -> AppResult<FrequencyTable> {
        let items = shard.iter().map(|d| d.as_ref().map(String::as_str));
        Ok(match &substring {
            None => count_delimited(items, &shard_config, provenance())?,
            Some(counter) => counter.count(items, &shard_config, provenance())?,
        })
    };

    let limit = job.config.doc_limit.map_or(usize::MAX, |l| usize::try_from(l).unwrap_or(usize::MAX));
    let mut docs = docs.into_iter().take(limit);
    let mut total = FrequencyTable::empty(&job.config, provenance());
    let batch_docs = job.batch_docs.max(1);
    let shards = job.shards.max(1);
    loop {
        let batch: Vec<_> = docs.by_ref().take(batch_docs).collect();
        if batch.is_empty() {
            break;
        }
        for skipped in batch.iter().filter_map(|d| d.as_ref().err()).take(3) {
            log::warn!("skipping document on line {}: {}", skipped.line_no, skipped.reason);
        }
        let piece = batch.len().div_ceil(shards);
        let parts: Vec<FrequencyTable> = batch.par_chunks(piece).map(count_shard).collect::<AppResult<_>>()?;
        total = merge_tables(std::iter::once(&total).chain(parts.iter()))?;
    }
    Ok(total)
}

fn clean_field(key: &str, value: &str) -> AppResult<()> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(AppError::user(format!("{key} {value:?} contains a tab or line break")));
    }
    Ok(())
}

pub fn render_table(table: &FrequencyTable) -> AppResult<String> {
    let p = &table.provenance;
    let doc_limit = p.doc_limit.map_or_else(|| "none".to_string(), |l| l.to_string());
    let values = [
        table.language_code.clone(),
        table.counting_mode.as_str().to_string(),
        table.docs_processed.to_string(),
        p.corpus_id.clone(),
        doc_limit,
        p.created.clone(),
        p.skipped_docs.to_string(),
        p.toolkit_version.clone(),
    ];
    let mut out = format!("{TABLE_MAGIC}\t{TABLE_FORMAT_VERSION}\n");
    for (k, v) in HEADER_KEYS.iter().zip(&values) {
        clean_field(k, v)?;
        writeln!(out, "#{k}\t{v}").unwrap();
    }
    for (word, count) in table.sorted_entries() {
        clean_field("word", word)?;
        writeln!(out, "{word}\t{count}").unwrap();
    }
    Ok(out)
}

pub fn write_table(table: &FrequencyTable, path: &Path) -> AppResult<()> {
    fsio::write_atomic(path, render_table(table)?.as_bytes())
}

/// Parses a table file. Files without the header block are read as bare
/// `word<TAB>count` rows with unknown provenance.
pub fn parse_table(text: &str) -> AppResult<FrequencyTable> {
    let mut lines = text.lines().enumerate().peekable();
    let mut config = LangConfig::for_language("und");
    config.counting_mode = CountingMode::Delimited;
    let mut table = FrequencyTable::empty(&config, Provenance::new("unknown", None, ""));
    if lines.peek().is_some_and(|(_, l)| l.starts_with(TABLE_MAGIC)) {
        lines.next();
        for key in HEADER_KEYS {
            let (n, line) = lines
                .next()
                .ok_or_else(|| AppError::user(format!("frequency table header ends before #{key}")))?;
            let value = line
                .strip_prefix('#')
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix('\t'))
                .ok_or_else(|| AppError::user(format!("line {}: expected header #{key}", n + 1)))?;
            let bad = |what: &str| AppError::user(format!("line {}: invalid {key} {what:?}", n + 1));
            match key {
                "language" => table.language_code = value.to_string(),
                "counting_mode" => table.counting_mode = CountingMode::parse(value).ok_or_else(|| bad(value))?,
                "docs_processed" => table.docs_processed = value.parse().map_err(|_| bad(value))?,
                "corpus_id" => table.provenance.corpus_id = value.to_string(),
                "doc_limit" => {
                    table.provenance.doc_limit = match value {
                        "none" => None,
                        v => Some(v.parse().map_err(|_| bad(v))?),
                    }
                }
                "created" => table.provenance.created = value.to_string(),
                "skipped_docs" => table.provenance.skipped_docs = value.parse().map_err(|_| bad(value))?,
                _ => table.provenance.toolkit_version = value.to_string(),
            }
        }
    }
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (word, count) = line
            .rsplit_once('\t')
            .ok_or_else(|| AppError::user(format!("line {}: expected word<TAB>count", n + 1)))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| AppError::user(format!("line {}: invalid count {count:?}", n + 1)))?;
        if word.is_empty() {
            return Err(AppError::user(format!("line {}: empty word", n + 1)));
        }
        if count == 0 {
            continue;
        }
        if table.entries.insert(word.to_string(), count).is_some() {
            return Err(AppError::user(format!("line {}: duplicate word {word:?}", n + 1)));
        }
    }
    Ok(table)
}

pub fn read_table(path: &Path) -> AppResult<FrequencyTable> {
    parse_table(&fsio::read_string(path)?).map_err(|e| e.context(format!("in {}", path.display())))
}

/// Candidate words for substring counting: the first column of each
/// non-empty line.
pub fn read_word_list(path: &Path) -> AppResult<BTreeSet<String>> {
    Ok(fsio::read_string(path)?
        .lines()
        .filter_map(|l| l.split('\t').next())
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect())
}
