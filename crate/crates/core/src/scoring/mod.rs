//! Scoring OCR readings against targets and aggregating the results.

pub mod classify;
pub mod edit;
pub mod prefs;
pub mod report;
pub mod validation;

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

pub use classify::{classify_error, ErrorClass, IrregularVerb, IrregularVerbs, LexicalTag};
pub use edit::{edit_script, EditOp, EditScript, EditStep};

use crate::text::{fold, is_punct_or_symbol};
use crate::wikispell::FrequencyBucket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleState {
    Correct,
    Incorrect,
    NoText,
    PipelineError,
}

impl SampleState {
    pub const ALL: [SampleState; 4] = [
        SampleState::Correct,
        SampleState::Incorrect,
        SampleState::NoText,
        SampleState::PipelineError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleState::Correct => "correct",
            SampleState::Incorrect => "incorrect",
            SampleState::NoText => "no-text",
            SampleState::PipelineError => "pipeline-error",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Strip punctuation and symbols from both ends of the reading before
    /// comparing. Off by default.
    pub strip_edge_punct: bool,
}

fn prepare(reading: &str, options: MatchOptions) -> &str {
    if options.strip_edge_punct {
        reading.trim_matches(|c: char| is_punct_or_symbol(c) || c.is_whitespace())
    } else {
        reading
    }
}

/// Whole-string, case-insensitive comparison. `None` readings are `NoText`.
pub fn match_spelling(target: &str, reading: Option<&str>) -> SampleState {
    match_spelling_with(target, reading, MatchOptions::default())
}

pub fn match_spelling_with(target: &str, reading: Option<&str>, options: MatchOptions) -> SampleState {
    match reading {
        None => SampleState::NoText,
        Some(r) if fold(prepare(r, options)) == fold(target) => SampleState::Correct,
        Some(_) => SampleState::Incorrect,
    }
}

/// Score of one generated image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleScore {
    pub prompt_id: String,
    pub sample_index: usize,
    pub target: String,
    #[serde(default)]
    pub bucket: Option<FrequencyBucket>,
    pub reading: Option<String>,
    pub state: SampleState,
    #[serde(default)]
    pub error_class: Option<ErrorClass>,
    #[serde(default)]
    pub tags: BTreeSet<LexicalTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// What the OCR stage produced for one image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadingOutcome<'a> {
    Reading(Option<&'a str>),
    Failed(&'a str),
}

/// Scores one sample: state, error class for misspellings, lexical tags.
pub fn score_sample(
    prompt_id: &str,
    sample_index: usize,
    target: &str,
    bucket: Option<FrequencyBucket>,
    outcome: ReadingOutcome<'_>,
    verbs: &IrregularVerbs,
    options: MatchOptions,
) -> SampleScore {
    let mut score = SampleScore {
        prompt_id: prompt_id.to_string(),
        sample_index,
        target: target.to_string(),
        bucket,
        reading: None,
        state: SampleState::PipelineError,
        error_class: None,
        tags: BTreeSet::new(),
        detail: None,
    };
    match outcome {
        ReadingOutcome::Failed(why) => score.detail = Some(why.to_string()),
        ReadingOutcome::Reading(reading) => {
            score.reading = reading.map(String::from);
            score.state = match_spelling_with(target, reading, options);
            if score.state == SampleState::Incorrect {
                let r = prepare(reading.unwrap_or_default(), options);
                // prepare() can only make a reading equal after folding, which would have scored Correct
                if let Ok((class, tags)) = classify_error(target, r, verbs) {
                    score.error_class = Some(class);
                    score.tags = tags;
                }
            }
        }
    }
    score
}
