//! Manual audit of OCR verdicts and the corrected accuracy it implies.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{SampleScore, SampleState};
use crate::rng::{streams, SeededRng};
use crate::{Error, Result};

pub const DEFAULT_PER_VERDICT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Incorrect => "incorrect",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correct" => Some(Verdict::Correct),
            "incorrect" => Some(Verdict::Incorrect),
            _ => None,
        }
    }

    /// OCR verdict for a scored sample; pipeline errors have none. A missed
    /// detection counts as an incorrect verdict.
    pub fn of(state: SampleState) -> Option<Self> {
        match state {
            SampleState::Correct => Some(Verdict::Correct),
            SampleState::Incorrect | SampleState::NoText => Some(Verdict::Incorrect),
            SampleState::PipelineError => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub model: String,
    pub prompt_id: String,
    pub sample_index: usize,
    pub target: String,
    pub reading: Option<String>,
    pub ocr_verdict: Verdict,
    pub manual_label: Option<Verdict>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationPlan {
    pub rows: Vec<ValidationRow>,
    pub warnings: Vec<String>,
}

/// Draws up to `per_verdict` OCR-correct and `per_verdict` OCR-incorrect
/// samples per model for manual labeling.
///
/// Candidates are ordered by (prompt id, sample index) before drawing and the
/// drawn rows are emitted in that order, so the sheet depends only on the
/// scores and the seed.
pub fn plan_validation(scores: &BTreeMap<String, Vec<SampleScore>>, per_verdict: usize, seed: u64) -> ValidationPlan {
    let mut plan = ValidationPlan::default();
    for (m, (model, samples)) in scores.iter().enumerate() {
        for (v, verdict) in [Verdict::Correct, Verdict::Incorrect].into_iter().enumerate() {
            let mut pool: Vec<&SampleScore> = samples.iter().filter(|s| Verdict::of(s.state) == Some(verdict)).collect();
            pool.sort_by(|a, b| (&a.prompt_id, a.sample_index).cmp(&(&b.prompt_id, b.sample_index)));
            let take = if pool.len() < per_verdict {
                plan.warnings.push(format!(
                    "model {model}: only {} OCR-{} samples available, wanted {per_verdict}",
                    pool.len(),
                    verdict.as_str()
                ));
                pool.len()
            } else {
                per_verdict
            };
            let stream = streams::VALIDATION_BASE + 2 * m as u64 + v as u64;
            let mut picked = SeededRng::new(seed, stream).sample_indices(pool.len(), take);
            picked.sort_unstable();
            plan.rows.extend(picked.into_iter().map(|i| {
                let s = pool[i];
                ValidationRow {
                    model: model.clone(),
                    prompt_id: s.prompt_id.clone(),
                    sample_index: s.sample_index,
                    target: s.target.clone(),
                    reading: s.reading.clone(),
                    ocr_verdict: verdict,
                    manual_label: None,
                }
            }));
        }
    }
    plan
}

/// `acc * (1 - fp) + (1 - acc) * fn`.
pub fn adjusted_accuracy(accuracy: f64, false_positive_rate: f64, false_negative_rate: f64) -> f64 {
    accuracy * (1.0 - false_positive_rate) + (1.0 - accuracy) * false_negative_rate
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub model: String,
    pub measured_accuracy: f64,
    pub labeled_ocr_correct: usize,
    pub labeled_ocr_incorrect: usize,
    /// Share of OCR-incorrect rows that a person marked correct.
    pub false_negative_rate: f64,
    /// Share of OCR-correct rows that a person marked incorrect.
    pub false_positive_rate: f64,
    pub adjusted_accuracy: f64,
}

/// Error rates from a completed sheet and the corrected accuracy.
pub fn apply_validation(model: &str, measured_accuracy: f64, rows: &[ValidationRow]) -> Result<ValidationOutcome> {
    let unlabeled: Vec<String> = rows
        .iter()
        .filter(|r| r.manual_label.is_none())
        .map(|r| format!("{}/{}#{}", r.model, r.prompt_id, r.sample_index))
        .collect();
    if !unlabeled.is_empty() {
        return Err(Error::Precondition(format!(
            "{} validation rows lack a manual label: {}",
            unlabeled.len(),
            unlabeled.join(", ")
        )));
    }
    if !(0.0..=1.0).contains(&measured_accuracy) {
        return Err(Error::Precondition(format!("measured accuracy {measured_accuracy} is outside [0, 1]")));
    }
    let count = |ocr: Verdict, manual: Option<Verdict>| {
        rows.iter()
            .filter(|r| r.ocr_verdict == ocr && manual.map_or(true, |m| r.manual_label == Some(m)))
            .count()
    };
    let ocr_correct = count(Verdict::Correct, None);
    let ocr_incorrect = count(Verdict::Incorrect, None);
    let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let fn_rate = rate(count(Verdict::Incorrect, Some(Verdict::Correct)), ocr_incorrect);
    let fp_rate = rate(count(Verdict::Correct, Some(Verdict::Incorrect)), ocr_correct);
    Ok(ValidationOutcome {
        model: model.to_string(),
        measured_accuracy,
        labeled_ocr_correct: ocr_correct,
        labeled_ocr_incorrect: ocr_incorrect,
        false_negative_rate: fn_rate,
        false_positive_rate: fp_rate,
        adjusted_accuracy: adjusted_accuracy(measured_accuracy, fp_rate, fn_rate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn scores(model_correct: usize, model_incorrect: usize) -> Vec<SampleScore> {
        (0..model_correct + model_incorrect)
            .map(|i| SampleScore {
                prompt_id: format!("p{:03}", i / 4),
                sample_index: i % 4,
                target: "t".into(),
                bucket: None,
                reading: Some("t".into()),
                state: if i < model_correct { SampleState::Correct } else { SampleState::Incorrect },
                error_class: None,
                tags: BTreeSet::new(),
                detail: None,
            })
            .collect()
    }

    #[test]
    fn formula_examples() {
        assert!((adjusted_accuracy(0.5, 0.0, 0.34) - 0.67).abs() < 1e-12);
        assert!((adjusted_accuracy(0.5, 0.0, 0.09) - 0.545).abs() < 1e-12);
        assert_eq!(adjusted_accuracy(0.42, 0.0, 0.0), 0.42);
    }

    #[test]
    fn balanced_plan_for_two_models() {
        let mut by_model = BTreeMap::new();
        by_model.insert("a".to_string(), scores(200, 200));
        by_model.insert("b".to_string(), scores(100, 300));
        let plan = plan_validation(&by_model, 32, 7);
        assert_eq!(plan.rows.len(), 128);
        assert!(plan.warnings.is_empty());
        assert_eq!(plan, plan_validation(&by_model, 32, 7));
        assert_ne!(plan.rows, plan_validation(&by_model, 32, 8).rows);
    }

    #[test]
    fn plan_shrinks_with_warning() {
        let mut by_model = BTreeMap::new();
        by_model.insert("a".to_string(), scores(100, 10));
        let plan = plan_validation(&by_model, 32, 1);
        assert_eq!(plan.rows.iter().filter(|r| r.ocr_verdict == Verdict::Incorrect).count(), 10);
        assert_eq!(plan.warnings.len(), 1);
    }

    #[test]
    fn apply_requires_labels_and_computes_rates() {
        let mut by_model = BTreeMap::new();
        by_model.insert("a".to_string(), scores(100, 100));
        let mut rows = plan_validation(&by_model, 4, 3).rows;
        assert!(apply_validation("a", 0.5, &rows).is_err());
        for (i, r) in rows.iter_mut().enumerate() {
            r.manual_label = Some(match (r.ocr_verdict, i % 4) {
                (Verdict::Incorrect, 0) => Verdict::Correct,
                (v, _) => v,
            });
        }
        let out = apply_validation("a", 0.5, &rows).unwrap();
        assert_eq!(out.false_positive_rate, 0.0);
        assert_eq!(out.false_negative_rate, 0.25);
        assert!((out.adjusted_accuracy - 0.625).abs() < 1e-12);
    }
}
