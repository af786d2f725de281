//! Side-by-side human preference ratings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// z for a two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Question {
    Fidelity,
    Alignment,
    TextAccuracy,
}

impl Question {
    pub const ALL: [Question; 3] = [Question::Fidelity, Question::Alignment, Question::TextAccuracy];

    pub fn as_str(self) -> &'static str {
        match self {
            Question::Fidelity => "fidelity",
            Question::Alignment => "alignment",
            Question::TextAccuracy => "text-accuracy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let norm: String = s.trim().chars().filter(|c| *c != '-' && *c != '_').collect();
        match norm.to_ascii_lowercase().as_str() {
            "fidelity" => Ok(Question::Fidelity),
            "alignment" => Ok(Question::Alignment),
            "textaccuracy" => Ok(Question::TextAccuracy),
            _ => Err(Error::Malformed(format!("unknown question {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Choice {
    A,
    B,
    Indifferent,
}

impl Choice {
    pub fn as_str(self) -> &'static str {
        match self {
            Choice::A => "A",
            Choice::B => "B",
            Choice::Indifferent => "Indifferent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Choice::A),
            "b" => Ok(Choice::B),
            "indifferent" => Ok(Choice::Indifferent),
            _ => Err(Error::Malformed(format!("invalid choice {s:?}, expected A, B or Indifferent"))),
        }
    }

    /// Credit towards A.
    pub fn credit(self) -> f64 {
        match self {
            Choice::A => 1.0,
            Choice::B => 0.0,
            Choice::Indifferent => 0.5,
        }
    }

    pub fn swap(self) -> Self {
        match self {
            Choice::A => Choice::B,
            Choice::B => Choice::A,
            Choice::Indifferent => Choice::Indifferent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceRecord {
    pub prompt_id: String,
    pub category: String,
    pub question: Question,
    pub rater_id: String,
    pub choice: Choice,
}

impl PreferenceRecord {
    /// The same judgment with the two systems' labels exchanged.
    pub fn swap(&self) -> Self {
        PreferenceRecord {
            choice: self.choice.swap(),
            ..self.clone()
        }
    }
}

pub fn text_accuracy_question(target: &str) -> String {
    format!("Which set of images more accurately shows the text: \"{target}\"?")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRate {
    pub n_prompts: usize,
    pub n_ratings: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreferenceReport {
    pub by_question: BTreeMap<Question, PreferenceRate>,
    pub by_category: BTreeMap<Question, BTreeMap<String, PreferenceRate>>,
}

/// Mean of per-prompt scores with a normal-approximation interval.
pub fn rate_of(prompt_scores: &[f64], n_ratings: usize) -> PreferenceRate {
    let n = prompt_scores.len();
    let mean = prompt_scores.iter().sum::<f64>() / n as f64;
    let half = if n > 1 {
        let var = prompt_scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
        Z95 * libm::sqrt(var) / libm::sqrt(n as f64)
    } else {
        0.0
    };
    PreferenceRate {
        n_prompts: n,
        n_ratings,
        rate: mean,
        ci_low: (mean - half).max(0.0),
        ci_high: (mean + half).min(1.0),
    }
}

/// Preference rate for system A per question and per (question, category).
///
/// Each prompt scores `(#A + 0.5 * #Indifferent) / #ratings`; rates average
/// prompt scores. A prompt whose records disagree on its category is an
/// error.
pub fn aggregate_preferences(records: &[PreferenceRecord]) -> Result<PreferenceReport> {
    // (question, prompt) -> (category, credit sum, ratings)
    let mut cells: BTreeMap<(Question, &str), (&str, f64, usize)> = BTreeMap::new();
    for r in records {
        let cell = cells
            .entry((r.question, r.prompt_id.as_str()))
            .or_insert((r.category.as_str(), 0.0, 0));
        if cell.0 != r.category {
            return Err(Error::Malformed(format!(
                "prompt {} appears under categories {:?} and {:?}",
                r.prompt_id, cell.0, r.category
            )));
        }
        cell.1 += r.choice.credit();
        cell.2 += 1;
    }
    let mut question_scores: BTreeMap<Question, (Vec<f64>, usize)> = BTreeMap::new();
    let mut category_scores: BTreeMap<(Question, &str), (Vec<f64>, usize)> = BTreeMap::new();
    for ((q, _), (cat, credit, n)) in &cells {
        let score = credit / *n as f64;
        let qs = question_scores.entry(*q).or_default();
        qs.0.push(score);
        qs.1 += n;
        let cs = category_scores.entry((*q, cat)).or_default();
        cs.0.push(score);
        cs.1 += n;
    }
    let mut report = PreferenceReport::default();
    for (q, (scores, n)) in question_scores {
        report.by_question.insert(q, rate_of(&scores, n));
    }
    for ((q, cat), (scores, n)) in category_scores {
        report
            .by_category
            .entry(q)
            .or_default()
            .insert(String::from(cat), rate_of(&scores, n));
    }
    Ok(report)
}
