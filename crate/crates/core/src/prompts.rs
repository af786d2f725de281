//! Prompt generation for rendered-text evaluation and the creative prompt corpus.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rng::{streams, SeededRng};
use crate::wikispell::FrequencyBucket;
use crate::{Error, Result};

pub const DEFAULT_TEMPLATE: &str = "A sign with the word \"{word}\" written on it.";
pub const WORD_PLACEHOLDER: &str = "{word}";
pub const DEFAULT_WORDS_PER_BUCKET: usize = 100;
pub const DEFAULT_SAMPLES_PER_PROMPT: usize = 4;

pub const CREATIVE_CORPUS: &str = include_str!("../assets/creative_prompts.txt");
pub const CREATIVE_CORPUS_SHA256: &str = include_str!("../assets/creative_prompts.sha256");
pub const CREATIVE_PROMPT_COUNT: usize = 175;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptKind {
    Spelling,
    Creative,
}

impl PromptKind {
    fn id_prefix(self) -> &'static str {
        match self {
            PromptKind::Spelling => "spell",
            PromptKind::Creative => "creative",
        }
    }
}

/// How much text a creative prompt asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthClass {
    OneLetter,
    OneWord,
    TwoWords,
    ThreePlus,
}

impl LengthClass {
    pub const ALL: [LengthClass; 4] = [
        LengthClass::OneLetter,
        LengthClass::OneWord,
        LengthClass::TwoWords,
        LengthClass::ThreePlus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LengthClass::OneLetter => "one-letter",
            LengthClass::OneWord => "one-word",
            LengthClass::TwoWords => "two-words",
            LengthClass::ThreePlus => "three-plus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        LengthClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub prompt_id: String,
    pub kind: PromptKind,
    pub prompt_text: String,
    pub target_text: Option<String>,
    pub bucket: Option<FrequencyBucket>,
    pub length_class: Option<LengthClass>,
}

/// `<kind>-<index, zero padded>-<first 8 hex digits of sha256(text)>`.
pub fn prompt_id(kind: PromptKind, index: usize, width: usize, text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    format!("{}-{:0width$}-{}", kind.id_prefix(), index, hex(&digest[..4]))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    const DIGITS: &[u8; 16] = b"0123456789abcdef";
    let mut s = String::with_capacity(bytes.len() * 2);
    for &b in bytes {
        s.push(DIGITS[(b >> 4) as usize] as char);
        s.push(DIGITS[(b & 0xf) as usize] as char);
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

pub fn render_template(template: &str, word: &str) -> Result<String> {
    if !template.contains(WORD_PLACEHOLDER) {
        return Err(Error::Config(format!("prompt template {template:?} lacks the {WORD_PLACEHOLDER} placeholder")));
    }
    Ok(template.replace(WORD_PLACEHOLDER, word))
}

/// Draws `words_per_bucket` words from each of the five buckets and renders
/// them into the template.
///
/// Each bucket's words are sorted before drawing, so the result depends only
/// on the word sets and the seed. Records come out bucket by bucket in draw
/// order and are numbered consecutively.
pub fn gen_spelling_prompts(
    eval_words: &BTreeMap<FrequencyBucket, Vec<String>>,
    words_per_bucket: usize,
    template: &str,
    seed: u64,
) -> Result<Vec<PromptRecord>> {
    render_template(template, "")?;
    if words_per_bucket == 0 {
        return Err(Error::Config("words per bucket must be positive".into()));
    }
    let total = words_per_bucket * FrequencyBucket::ALL.len();
    let width = digits(total.saturating_sub(1)).max(4);
    let mut out = Vec::with_capacity(total);
    for bucket in FrequencyBucket::ALL {
        let pool: BTreeSet<&str> = eval_words
            .get(&bucket)
            .map(|v| v.iter().map(String::as_str).collect())
            .unwrap_or_default();
        if pool.len() < words_per_bucket {
            return Err(Error::InsufficientPool {
                pool: format!("bucket {bucket} evaluation words"),
                needed: words_per_bucket,
                available: pool.len(),
            });
        }
        let pool: Vec<&str> = pool.into_iter().collect();
        let mut rng = SeededRng::new(seed, streams::SPELLING_PROMPTS_BASE + bucket.index() as u64);
        for i in rng.sample_indices(pool.len(), words_per_bucket) {
            let word = pool[i];
            let text = render_template(template, word)?;
            out.push(PromptRecord {
                prompt_id: prompt_id(PromptKind::Spelling, out.len(), width, &text),
                kind: PromptKind::Spelling,
                prompt_text: text,
                target_text: Some(word.to_string()),
                bucket: Some(bucket),
                length_class: None,
            });
        }
    }
    Ok(out)
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

/// Target text of a free-form prompt.
///
/// The longest double-quoted span wins. Without one, the longest
/// single-quoted span (straight or curly quotes, opening after whitespace or
/// at the start, closing before a non-alphanumeric character) is used, so
/// that apostrophes inside words are not mistaken for quotes.
pub fn extract_quoted(prompt: &str) -> Option<String> {
    let doubles = double_quoted_spans(prompt);
    let spans = if doubles.is_empty() { single_quoted_spans(prompt) } else { doubles };
    spans
        .into_iter()
        .filter(|s| !s.is_empty())
        .fold(None, |best: Option<&str>, s| match best {
            Some(b) if b.chars().count() >= s.chars().count() => Some(b),
            _ => Some(s),
        })
        .map(String::from)
}

fn double_quoted_spans(s: &str) -> Vec<&str> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, c) in s.char_indices() {
        match (c, open) {
            ('"', None) | ('\u{201C}', None) => open = Some(i + c.len_utf8()),
            ('"', Some(start)) | ('\u{201D}', Some(start)) => {
                spans.push(&s[start..i]);
                open = None;
            }
            _ => {}
        }
    }
    spans
}

fn single_quoted_spans(s: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (k, &(i, c)) in chars.iter().enumerate() {
        let prev = if k == 0 { None } else { Some(chars[k - 1].1) };
        let next = chars.get(k + 1).map(|&(_, n)| n);
        match open {
            None if (c == '\'' || c == '\u{2018}') && prev.map_or(true, char::is_whitespace) => {
                open = Some(i + c.len_utf8());
            }
            Some(start) if (c == '\'' || c == '\u{2019}') && next.map_or(true, |n| !n.is_alphanumeric()) => {
                spans.push(&s[start..i]);
                open = None;
            }
            _ => {}
        }
    }
    spans
}

/// Parses a corpus asset: `## <length-class>` header lines followed by one
/// prompt per line. Lines starting with a single `#` are comments.
pub fn parse_creative_corpus(text: &str) -> Result<Vec<PromptRecord>> {
    let mut class: Option<LengthClass> = None;
    let mut raw: Vec<(LengthClass, &str)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if let Some(header) = line.strip_prefix("## ") {
            class = Some(LengthClass::parse(header.trim()).ok_or_else(|| {
                Error::Malformed(format!("line {}: unknown length class {header:?}", n + 1))
            })?);
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else {
            let c = class.ok_or_else(|| Error::Malformed(format!("line {}: prompt before any length-class header", n + 1)))?;
            raw.push((c, line));
        }
    }
    let width = digits(raw.len().saturating_sub(1)).max(3);
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(i, (c, line))| PromptRecord {
            prompt_id: prompt_id(PromptKind::Creative, i, width, line),
            kind: PromptKind::Creative,
            prompt_text: line.to_string(),
            target_text: extract_quoted(line),
            bucket: None,
            length_class: Some(c),
        })
        .collect())
}

/// Loads `text` after checking it against a pinned SHA-256 digest.
pub fn load_creative_from(text: &str, expected_sha256: &str) -> Result<Vec<PromptRecord>> {
    let found = sha256_hex(text.as_bytes());
    let expected = expected_sha256.trim();
    if found != expected {
        return Err(Error::Checksum {
            asset: "creative prompt corpus".into(),
            expected: expected.to_string(),
            found,
        });
    }
    parse_creative_corpus(text)
}

/// The shipped 175-prompt creative corpus.
pub fn load_creative_prompts() -> Result<Vec<PromptRecord>> {
    load_creative_from(CREATIVE_CORPUS, CREATIVE_CORPUS_SHA256)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub prompt_id: String,
    pub sample_index: usize,
    pub prompt: String,
    pub target: Option<String>,
    pub bucket: Option<FrequencyBucket>,
    pub image_path: String,
}

pub fn image_path(prompt_id: &str, sample_index: usize) -> String {
    format!("images/{prompt_id}/{sample_index}.png")
}

/// One row per (prompt, sample), ordered by prompt id then sample index.
pub fn build_manifest(prompts: &[PromptRecord], samples_per_prompt: usize) -> Result<Vec<ManifestRow>> {
    if samples_per_prompt == 0 {
        return Err(Error::Config("samples per prompt must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    for p in prompts {
        if !seen.insert(p.prompt_id.as_str()) {
            return Err(Error::Config(format!("duplicate prompt id {}", p.prompt_id)));
        }
    }
    let mut sorted: Vec<&PromptRecord> = prompts.iter().collect();
    sorted.sort_by(|a, b| a.prompt_id.cmp(&b.prompt_id));
    Ok(sorted
        .into_iter()
        .flat_map(|p| {
            (0..samples_per_prompt).map(move |s| ManifestRow {
                prompt_id: p.prompt_id.clone(),
                sample_index: s,
                prompt: p.prompt_text.clone(),
                target: p.target_text.clone(),
                bucket: p.bucket,
                image_path: image_path(&p.prompt_id, s),
            })
        })
        .collect())
}
