//! Candidate headwords and the single-word exclusion rules.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::{is_punct_or_symbol, scalar_len};
use crate::{Error, Result};

/// Longest headword kept, in Unicode scalar values.
pub const MAX_HEADWORD_LEN: usize = 30;

/// Ingest fails outright when more than this share of rows is malformed.
pub const MAX_MALFORMED_SHARE: f64 = 0.10;

/// Reasons in the order they are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    Whitespace,
    AllPunctSymbol,
    TooLong,
    Proverb,
}

impl ExclusionReason {
    pub const ALL: [ExclusionReason; 4] = [
        ExclusionReason::Whitespace,
        ExclusionReason::AllPunctSymbol,
        ExclusionReason::TooLong,
        ExclusionReason::Proverb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::Whitespace => "whitespace",
            ExclusionReason::AllPunctSymbol => "all-punct-symbol",
            ExclusionReason::TooLong => "too-long",
            ExclusionReason::Proverb => "proverb",
        }
    }

    /// Whether `entry` actually violates this rule.
    pub fn applies_to(self, entry: &LexiconEntry) -> bool {
        let w = entry.headword.as_str();
        match self {
            ExclusionReason::Whitespace => w.chars().any(char::is_whitespace),
            ExclusionReason::AllPunctSymbol => w.chars().all(is_punct_or_symbol),
            ExclusionReason::TooLong => scalar_len(w) > MAX_HEADWORD_LEN,
            ExclusionReason::Proverb => entry.pos_tags.iter().any(|t| t == "Proverb"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "reason")]
pub enum EntryStatus {
    Pending,
    Kept,
    Excluded(ExclusionReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub headword: String,
    pub language_code: String,
    pub pos_tags: BTreeSet<String>,
    pub status: EntryStatus,
}

impl LexiconEntry {
    pub fn new(headword: impl Into<String>, language_code: impl Into<String>, pos: &[&str]) -> Self {
        LexiconEntry {
            headword: headword.into(),
            language_code: language_code.into(),
            pos_tags: pos.iter().map(|p| p.to_string()).collect(),
            status: EntryStatus::Pending,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub counts: BTreeMap<ExclusionReason, u64>,
    pub total_in: u64,
    pub total_kept: u64,
}

impl ExclusionReport {
    pub fn excluded(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.total_in == self.total_kept + self.excluded()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line_no: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestOutcome {
    pub entries: Vec<LexiconEntry>,
    pub rows_read: usize,
    pub malformed: Vec<RowError>,
}

/// Parses `headword<TAB>language[<TAB>pos1|pos2|...]`.
pub fn parse_lexicon_row(line: &str) -> core::result::Result<(String, String, Vec<String>), String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if !(2..=3).contains(&cols.len()) {
        return Err(format!("expected 2 or 3 tab-separated columns, found {}", cols.len()));
    }
    let headword = cols[0];
    let language = cols[1].trim();
    if headword.is_empty() {
        return Err("empty headword".into());
    }
    if language.is_empty() {
        return Err("empty language code".into());
    }
    let pos = cols
        .get(2)
        .map(|p| {
            p.split('|')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();
    Ok((headword.to_string(), language.to_string(), pos))
}

/// Reads lexicon rows, merging duplicate (language, headword) pairs.
///
/// Blank lines are ignored. Malformed rows are skipped and returned in the
/// outcome; more than 10% malformed rows is an error because it usually
/// means the wrong file was supplied.
pub fn ingest_lexicon<'a, I>(lines: I) -> Result<IngestOutcome>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = IngestOutcome::default();
    let mut index: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (i, raw) in lines.into_iter().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        out.rows_read += 1;
        match parse_lexicon_row(line) {
            Ok((headword, language, pos)) => {
                let key = (language, headword);
                match index.get(&key) {
                    Some(&at) => out.entries[at].pos_tags.extend(pos),
                    None => {
                        index.insert(key.clone(), out.entries.len());
                        out.entries.push(LexiconEntry {
                            headword: key.1,
                            language_code: key.0,
                            pos_tags: pos.into_iter().collect(),
                            status: EntryStatus::Pending,
                        });
                    }
                }
            }
            Err(message) => out.malformed.push(RowError { line_no: i + 1, message }),
        }
    }
    if out.rows_read > 0 && out.malformed.len() as f64 > MAX_MALFORMED_SHARE * out.rows_read as f64 {
        let first = &out.malformed[0];
        return Err(Error::Malformed(format!(
            "{} of {} lexicon rows are malformed (first at line {}: {})",
            out.malformed.len(),
            out.rows_read,
            first.line_no,
            first.message
        )));
    }
    Ok(out)
}

/// First rule the entry violates, if any.
pub fn exclusion_reason(entry: &LexiconEntry) -> Option<ExclusionReason> {
    ExclusionReason::ALL.into_iter().find(|r| r.applies_to(entry))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterOutcome {
    pub kept: Vec<LexiconEntry>,
    pub excluded: Vec<LexiconEntry>,
    pub report: ExclusionReport,
}

/// Marks every entry kept or excluded and tallies the reasons.
pub fn filter_entries<I>(entries: I) -> FilterOutcome
where
    I: IntoIterator<Item = LexiconEntry>,
{
    let mut out = FilterOutcome::default();
    for mut entry in entries {
        out.report.total_in += 1;
        match exclusion_reason(&entry) {
            Some(reason) => {
                entry.status = EntryStatus::Excluded(reason);
                *out.report.counts.entry(reason).or_insert(0) += 1;
                out.excluded.push(entry);
            }
            None => {
                entry.status = EntryStatus::Kept;
                out.report.total_kept += 1;
                out.kept.push(entry);
            }
        }
    }
    out
}
