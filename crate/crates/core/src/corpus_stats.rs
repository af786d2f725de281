//! Word-frequency tables over document streams.
//!
//! Two counting modes exist. `Delimited` splits each document on a fixed
//! delimiter set plus Unicode whitespace and counts token occurrences.
//! `DocSubstring` is for scripts written without spaces: it counts, for each
//! candidate word, the number of documents containing it as a substring.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use aho_corasick::AhoCorasick;
use serde::{Deserialize, Serialize};

use crate::text::fold;
use crate::{Error, Result, TOOLKIT_VERSION};

/// Default delimiter set for whitespace-separated languages. Whitespace is
/// always a delimiter in addition to these.
pub const DEFAULT_DELIMITERS: [char; 18] = [
    '?', '!', '/', ':', ';', ',', '\\', '"', '&', '(', ')', '[', ']', '{', '}', '<', '>', '`',
];

/// Languages counted by document substring under the default profile.
pub const SUBSTRING_LANGUAGES: [&str; 2] = ["zh", "th"];

pub const DEFAULT_DOC_LIMIT: u64 = 1_000_000;
pub const ENGLISH_DOC_LIMIT: u64 = 140_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingMode {
    Delimited,
    DocSubstring,
}

impl CountingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CountingMode::Delimited => "delimited",
            CountingMode::DocSubstring => "doc-substring",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "delimited" => Some(CountingMode::Delimited),
            "doc-substring" => Some(CountingMode::DocSubstring),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangConfig {
    pub language_code: String,
    pub counting_mode: CountingMode,
    pub delimiters: BTreeSet<char>,
    pub doc_limit: Option<u64>,
    pub case_sensitive: bool,
}

impl LangConfig {
    /// Default profile for a language: substring counting for `zh`/`th`,
    /// delimiter splitting otherwise; 140M documents for English and 1M for
    /// everything else.
    pub fn for_language(code: &str) -> Self {
        let base = primary_subtag(code);
        let counting_mode = if SUBSTRING_LANGUAGES.contains(&base.as_str()) {
            CountingMode::DocSubstring
        } else {
            CountingMode::Delimited
        };
        let doc_limit = if base == "en" { ENGLISH_DOC_LIMIT } else { DEFAULT_DOC_LIMIT };
        LangConfig {
            language_code: code.to_string(),
            counting_mode,
            delimiters: DEFAULT_DELIMITERS.iter().copied().collect(),
            doc_limit: Some(doc_limit),
            case_sensitive: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.language_code.is_empty() {
            return Err(Error::Config("language code must not be empty".into()));
        }
        if self.counting_mode == CountingMode::Delimited && self.delimiters.is_empty() {
            return Err(Error::Config("delimited counting requires a non-empty delimiter set".into()));
        }
        Ok(())
    }

    fn is_delimiter(&self, c: char) -> bool {
        c.is_whitespace() || self.delimiters.contains(&c)
    }
}

fn primary_subtag(code: &str) -> String {
    code.split(['-', '_']).next().unwrap_or("").to_ascii_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub corpus_id: String,
    pub doc_limit: Option<u64>,
    pub toolkit_version: String,
    pub created: String,
    pub skipped_docs: u64,
}

impl Provenance {
    pub fn new(corpus_id: impl Into<String>, doc_limit: Option<u64>, created: impl Into<String>) -> Self {
        Provenance {
            corpus_id: corpus_id.into(),
            doc_limit,
            toolkit_version: TOOLKIT_VERSION.to_string(),
            created: created.into(),
            skipped_docs: 0,
        }
    }
}

/// Word counts for one language and corpus sample. Absent words have count 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub language_code: String,
    pub counting_mode: CountingMode,
    pub entries: BTreeMap<String, u64>,
    pub docs_processed: u64,
    pub provenance: Provenance,
}

impl FrequencyTable {
    pub fn empty(config: &LangConfig, provenance: Provenance) -> Self {
        FrequencyTable {
            language_code: config.language_code.clone(),
            counting_mode: config.counting_mode,
            entries: BTreeMap::new(),
            docs_processed: 0,
            provenance,
        }
    }

    pub fn count(&self, word: &str) -> u64 {
        self.entries.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Entries ordered by count descending, then word ascending.
    pub fn sorted_entries(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<(&str, u64)> = self.entries.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }

    fn add(&mut self, word: &str, n: u64) {
        if n == 0 {
            return;
        }
        match self.entries.get_mut(word) {
            Some(c) => *c += n,
            None => {
                self.entries.insert(word.to_string(), n);
            }
        }
    }
}

/// Maximal runs of non-delimiter, non-whitespace characters, in order.
pub fn segment_delimited<'a>(text: &'a str, config: &'a LangConfig) -> impl Iterator<Item = &'a str> + 'a {
    text.split(move |c: char| config.is_delimiter(c)).filter(|t| !t.is_empty())
}

fn check_mode(config: &LangConfig, want: CountingMode) -> Result<()> {
    config.validate()?;
    if config.counting_mode != want {
        return Err(Error::Config(alloc::format!(
            "language {} is configured for {} counting, not {}",
            config.language_code,
            config.counting_mode.as_str(),
            want.as_str()
        )));
    }
    Ok(())
}

/// Counts token occurrences across the document stream.
///
/// `Err` items are documents the caller could not read; they are tallied in
/// `provenance.skipped_docs`. At most `doc_limit` items are consumed.
pub fn count_delimited<I, S, E>(docs: I, config: &LangConfig, provenance: Provenance) -> Result<FrequencyTable>
where
    I: IntoIterator<Item = core::result::Result<S, E>>,
    S: AsRef<str>,
{
    check_mode(config, CountingMode::Delimited)?;
    let mut table = FrequencyTable::empty(config, provenance);
    let mut scratch: BTreeMap<String, u64> = BTreeMap::new();
    for doc in docs.into_iter().take(take_limit(config)) {
        let Ok(doc) = doc else {
            table.provenance.skipped_docs += 1;
            continue;
        };
        for token in segment_delimited(doc.as_ref(), config) {
            if config.case_sensitive {
                table.add(token, 1);
            } else {
                *scratch.entry(fold(token)).or_insert(0) += 1;
            }
        }
        table.docs_processed += 1;
    }
    for (w, n) in scratch {
        table.add(&w, n);
    }
    Ok(table)
}

fn take_limit(config: &LangConfig) -> usize {
    config.doc_limit.map_or(usize::MAX, |l| usize::try_from(l).unwrap_or(usize::MAX))
}

/// Multi-pattern matcher reused across shards of one substring-counting job.
#[derive(Debug, Clone)]
pub struct SubstringCounter {
    words: Vec<String>,
    matcher: AhoCorasick,
    case_sensitive: bool,
}

impl SubstringCounter {
    pub fn new(words: &BTreeSet<String>, config: &LangConfig) -> Result<Self> {
        check_mode(config, CountingMode::DocSubstring)?;
        if words.is_empty() {
            return Err(Error::Precondition("substring counting needs at least one candidate word".into()));
        }
        if words.iter().any(|w| w.is_empty()) {
            return Err(Error::Precondition("candidate words must be non-empty".into()));
        }
        let words: Vec<String> = if config.case_sensitive {
            words.iter().cloned().collect()
        } else {
            let folded: BTreeSet<String> = words.iter().map(|w| fold(w)).collect();
            folded.into_iter().collect()
        };
        let matcher = AhoCorasick::new(&words)
            .map_err(|e| Error::Config(alloc::format!("cannot build substring matcher: {e}")))?;
        Ok(SubstringCounter {
            words,
            matcher,
            case_sensitive: config.case_sensitive,
        })
    }

    /// Document frequencies over the stream, each document scanned once.
    pub fn count<I, S, E>(&self, docs: I, config: &LangConfig, provenance: Provenance) -> Result<FrequencyTable>
    where
        I: IntoIterator<Item = core::result::Result<S, E>>,
        S: AsRef<str>,
    {
        check_mode(config, CountingMode::DocSubstring)?;
        let mut table = FrequencyTable::empty(config, provenance);
        let mut doc_counts = vec![0u64; self.words.len()];
        // last_seen[p] holds 1 + index of the last document that matched pattern p.
        let mut last_seen = vec![0u64; self.words.len()];
        for doc in docs.into_iter().take(take_limit(config)) {
            let Ok(doc) = doc else {
                table.provenance.skipped_docs += 1;
                continue;
            };
            table.docs_processed += 1;
            let stamp = table.docs_processed;
            let folded;
            let haystack = if self.case_sensitive {
                doc.as_ref()
            } else {
                folded = fold(doc.as_ref());
                folded.as_str()
            };
            for m in self.matcher.find_overlapping_iter(haystack) {
                let p = m.pattern().as_usize();
                if last_seen[p] != stamp {
                    last_seen[p] = stamp;
                    doc_counts[p] += 1;
                }
            }
        }
        for (word, n) in self.words.iter().zip(doc_counts) {
            table.add(word, n);
        }
        Ok(table)
    }
}

/// Number of documents containing each candidate word as a substring.
pub fn count_doc_substring<I, S, E>(
    docs: I,
    words: &BTreeSet<String>,
    config: &LangConfig,
    provenance: Provenance,
) -> Result<FrequencyTable>
where
    I: IntoIterator<Item = core::result::Result<S, E>>,
    S: AsRef<str>,
{
    SubstringCounter::new(words, config)?.count(docs, config, provenance)
}

/// Pointwise sum of shard tables.
///
/// Provenance is merged so the result does not depend on part order: corpus
/// ids are de-duplicated and joined with `+`, the latest `created` stamp and
/// largest doc limit win, and skipped-document tallies are summed.
pub fn merge_tables<'a, I>(parts: I) -> Result<FrequencyTable>
where
    I: IntoIterator<Item = &'a FrequencyTable>,
{
    let mut parts = parts.into_iter();
    let first = parts
        .next()
        .ok_or_else(|| Error::Precondition("merge_tables needs at least one table".into()))?;
    let mut merged = first.clone();
    let mut corpus_ids: BTreeSet<String> = first.provenance.corpus_id.split('+').map(String::from).collect();
    for part in parts {
        if part.language_code != merged.language_code || part.counting_mode != merged.counting_mode {
            return Err(Error::Config(alloc::format!(
                "cannot merge {}/{} table into {}/{} table",
                part.language_code,
                part.counting_mode.as_str(),
                merged.language_code,
                merged.counting_mode.as_str()
            )));
        }
        for (w, &n) in &part.entries {
            merged.add(w, n);
        }
        merged.docs_processed += part.docs_processed;
        let p = &mut merged.provenance;
        p.skipped_docs += part.provenance.skipped_docs;
        corpus_ids.extend(part.provenance.corpus_id.split('+').map(String::from));
        if part.provenance.created > p.created {
            p.created = part.provenance.created.clone();
        }
        p.doc_limit = match (p.doc_limit, part.provenance.doc_limit) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        if part.provenance.toolkit_version > p.toolkit_version {
            p.toolkit_version = part.provenance.toolkit_version.clone();
        }
    }
    merged.provenance.corpus_id = corpus_ids.into_iter().collect::<Vec<_>>().join("+");
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;

    fn ok_docs<'a>(docs: &'a [&'a str]) -> impl Iterator<Item = core::result::Result<&'a str, Infallible>> + 'a {
        docs.iter().map(|d| Ok(*d))
    }

    fn prov() -> Provenance {
        Provenance::new("test", None, "1970-01-01T00:00:00Z")
    }

    fn en() -> LangConfig {
        let mut c = LangConfig::for_language("en");
        c.doc_limit = None;
        c
    }

    #[test]
    fn default_profile() {
        assert_eq!(LangConfig::for_language("zh").counting_mode, CountingMode::DocSubstring);
        assert_eq!(LangConfig::for_language("th").counting_mode, CountingMode::DocSubstring);
        assert_eq!(LangConfig::for_language("ko").counting_mode, CountingMode::Delimited);
        assert_eq!(LangConfig::for_language("en").doc_limit, Some(140_000_000));
        assert_eq!(LangConfig::for_language("fi").doc_limit, Some(1_000_000));
        assert_eq!(LangConfig::for_language("zh-Hant").counting_mode, CountingMode::DocSubstring);
    }

    #[test]
    fn segments_on_delimiters_and_whitespace() {
        let c = en();
        let toks: Vec<_> = segment_delimited("hello,world \"foo\"", &c).collect();
        assert_eq!(toks, ["hello", "world", "foo"]);
        let toks: Vec<_> = segment_delimited("don't stop.", &c).collect();
        assert_eq!(toks, ["don't", "stop."]);
        assert_eq!(segment_delimited("", &c).count(), 0);
        let toks: Vec<_> = segment_delimited("a\u{3000}b\u{a0}c\td", &c).collect();
        assert_eq!(toks, ["a", "b", "c", "d"]);
    }

    #[test]
    fn counts_hand_example() {
        let t = count_delimited(ok_docs(&["a b a", "b"]), &en(), prov()).unwrap();
        assert_eq!(t.count("a"), 2);
        assert_eq!(t.count("b"), 2);
        assert_eq!(t.docs_processed, 2);
        let t = count_delimited(ok_docs(&[]), &en(), prov()).unwrap();
        assert!(t.entries.is_empty());
        assert_eq!(t.docs_processed, 0);
    }

    #[test]
    fn case_sensitivity() {
        let docs = ["Dog dog DOG"];
        let t = count_delimited(ok_docs(&docs), &en(), prov()).unwrap();
        assert_eq!(t.entries.len(), 3);
        let mut c = en();
        c.case_sensitive = false;
        let t = count_delimited(ok_docs(&docs), &c, prov()).unwrap();
        assert_eq!(t.count("dog"), 3);
    }

    #[test]
    fn skipped_docs_and_limit() {
        let docs: Vec<core::result::Result<&str, ()>> = vec![Ok("a"), Err(()), Ok("a b"), Ok("c")];
        let mut c = en();
        c.doc_limit = Some(3);
        let t = count_delimited(docs, &c, prov()).unwrap();
        assert_eq!(t.docs_processed, 2);
        assert_eq!(t.provenance.skipped_docs, 1);
        assert_eq!(t.count("a"), 2);
        assert_eq!(t.count("c"), 0);
    }

    #[test]
    fn wrong_mode_is_rejected() {
        let zh = LangConfig::for_language("zh");
        assert!(matches!(count_delimited(ok_docs(&["x"]), &zh, prov()), Err(Error::Config(_))));
        let words: BTreeSet<String> = ["a".into()].into();
        assert!(matches!(count_doc_substring(ok_docs(&["a"]), &words, &en(), prov()), Err(Error::Config(_))));
    }

    #[test]
    fn document_frequency_not_occurrences() {
        let zh = LangConfig::for_language("zh");
        let words: BTreeSet<String> = ["a".into()].into();
        let t = count_doc_substring(ok_docs(&["abc", "aabca"]), &words, &zh, prov()).unwrap();
        assert_eq!(t.count("a"), 2);
        let t = count_doc_substring(ok_docs(&["xyz"]), &words, &zh, prov()).unwrap();
        assert!(t.entries.is_empty());
    }

    #[test]
    fn overlapping_words_both_counted() {
        let zh = LangConfig::for_language("zh");
        let words: BTreeSet<String> = ["中国".into(), "国人".into(), "中国人".into()].into();
        let t = count_doc_substring(ok_docs(&["我是中国人", "国人"]), &words, &zh, prov()).unwrap();
        assert_eq!(t.count("中国"), 1);
        assert_eq!(t.count("国人"), 2);
        assert_eq!(t.count("中国人"), 1);
    }

    #[test]
    fn merge_sums_and_rejects_mismatch() {
        let a = count_delimited(ok_docs(&["a"]), &en(), prov()).unwrap();
        let b = count_delimited(ok_docs(&["a a b"]), &en(), prov()).unwrap();
        let m = merge_tables([&a, &b]).unwrap();
        assert_eq!(m.count("a"), 3);
        assert_eq!(m.count("b"), 1);
        assert_eq!(m.docs_processed, 2);
        assert_eq!(merge_tables([&b, &a]).unwrap(), m);

        let mut fi = en();
        fi.language_code = "fi".into();
        let c = count_delimited(ok_docs(&["a"]), &fi, prov()).unwrap();
        assert!(matches!(merge_tables([&a, &c]), Err(Error::Config(_))));
    }

    #[test]
    fn sorted_entries_order() {
        let t = count_delimited(ok_docs(&["b a c a b z"]), &en(), prov()).unwrap();
        let rows = t.sorted_entries();
        assert_eq!(rows, [("a", 2), ("b", 2), ("c", 1), ("z", 1)]);
    }
}
