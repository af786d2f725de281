//! Lexicon TSV input, kept-word output and the exclusion report.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spellbench_core::lexicon::{filter_entries, ingest_lexicon, EntryStatus, FilterOutcome, LexiconEntry};

use crate::error::{AppError, AppResult};
use crate::fsio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedRow {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconReport {
    pub language: Option<String>,
    pub rows_read: usize,
    pub malformed_rows: Vec<MalformedRow>,
    pub other_languages: usize,
    pub total_in: u64,
    pub total_kept: u64,
    pub excluded: BTreeMap<String, u64>,
}

#[derive(Debug, Clone)]
pub struct FilteredLexicon {
    pub outcome: FilterOutcome,
    pub report: LexiconReport,
}

fn primary(code: &str) -> String {
    code.split(['-', '_']).next().unwrap_or("").to_ascii_lowercase()
}

/// Ingests, optionally keeps one language, and applies the exclusion rules.
/// Entries are classified in parallel chunks and reassembled in input order.
pub fn filter_lexicon(text: &str, language: Option<&str>) -> AppResult<FilteredLexicon> {
    let ingest = ingest_lexicon(text.lines())?;
    for bad in ingest.malformed.iter().take(5) {
        log::warn!("skipping malformed lexicon line {}: {}", bad.line_no, bad.message);
    }
    let total = ingest.entries.len();
    let entries: Vec<LexiconEntry> = match language {
        Some(lang) => {
            let want = primary(lang);
            ingest.entries.into_iter().filter(|e| primary(&e.language_code) == want).collect()
        }
        None => {
            let langs: std::collections::BTreeSet<&str> = ingest.entries.iter().map(|e| e.language_code.as_str()).collect();
            if langs.len() > 1 {
                return Err(AppError::user(format!(
                    "lexicon mixes languages ({}); pass --lang to pick one",
                    langs.into_iter().collect::<Vec<_>>().join(", ")
                )));
            }
            ingest.entries
        }
    };
    let other_languages = total - entries.len();
    let chunk = entries.len().div_ceil(rayon::current_num_threads()).max(1024);
    let parts: Vec<FilterOutcome> = entries.par_chunks(chunk).map(|c| filter_entries(c.to_vec())).collect();
    let mut outcome = FilterOutcome::default();
    for p in parts {
        outcome.kept.extend(p.kept);
        outcome.excluded.extend(p.excluded);
        outcome.report.total_in += p.report.total_in;
        outcome.report.total_kept += p.report.total_kept;
        for (r, n) in p.report.counts {
            *outcome.report.counts.entry(r).or_insert(0) += n;
        }
    }
    let report = LexiconReport {
        language: language.map(String::from),
        rows_read: ingest.rows_read,
        malformed_rows: ingest
            .malformed
            .iter()
            .map(|m| MalformedRow {
                line: m.line_no,
                message: m.message.clone(),
            })
            .collect(),
        other_languages,
        total_in: outcome.report.total_in,
        total_kept: outcome.report.total_kept,
        excluded: outcome
            .report
            .counts
            .iter()
            .map(|(r, n)| (r.as_str().to_string(), *n))
            .collect(),
    };
    Ok(FilteredLexicon { outcome, report })
}

pub fn render_kept(outcome: &FilterOutcome) -> String {
    outcome.kept.iter().map(|e| format!("{}\n", e.headword)).collect()
}

pub fn render_excluded(outcome: &FilterOutcome) -> String {
    outcome
        .excluded
        .iter()
        .map(|e| match e.status {
            EntryStatus::Excluded(r) => format!("{}\t{}\n", e.headword.replace(['\t', '\n'], " "), r.as_str()),
            _ => unreachable!("excluded entries carry a reason"),
        })
        .collect()
}

/// Kept-lexicon file: one headword per line.
pub fn read_kept(path: &Path) -> AppResult<Vec<String>> {
    let words: Vec<String> = fsio::read_string(path)?
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').next().unwrap_or(l).to_string())
        .collect();
    if words.is_empty() {
        return Err(AppError::user(format!("{} holds no words", path.display())));
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_by_language_and_reports() {
        let text = "dog\ten\tNoun\nice cream\ten\tNoun\nchien\tfr\tNoun\n!!\ten\n";
        let f = filter_lexicon(text, Some("en")).unwrap();
        assert_eq!(render_kept(&f.outcome), "dog\n");
        assert_eq!(f.report.other_languages, 1);
        assert_eq!(f.report.excluded["whitespace"], 1);
        assert_eq!(f.report.excluded["all-punct-symbol"], 1);
        assert_eq!(render_excluded(&f.outcome), "ice cream\twhitespace\n!!\tall-punct-symbol\n");
        assert!(filter_lexicon(text, None).is_err());
    }

    #[test]
    fn chunked_filter_keeps_order() {
        let text: String = (0..5000).map(|i| if i % 3 == 0 { format!("w {i}\ten\n") } else { format!("w{i}\ten\n") }).collect();
        let f = filter_lexicon(&text, None).unwrap();
        let expected: String = (0..5000).filter(|i| i % 3 != 0).map(|i| format!("w{i}\n")).collect();
        assert_eq!(render_kept(&f.outcome), expected);
        assert_eq!(f.report.total_in, 5000);
    }
}
