//! Per-bucket accuracy and consistency rates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ErrorClass, IrregularVerbs, LexicalTag, SampleScore, SampleState};
use crate::text::fold;
use crate::wikispell::FrequencyBucket;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketReport {
    /// `None` groups samples whose prompts carry no bucket.
    pub bucket: Option<FrequencyBucket>,
    pub n_words: usize,
    pub n_samples: usize,
    /// Correct / (Correct + Incorrect + NoText).
    pub accuracy: f64,
    /// Share of consistency-eligible words with every sample correct.
    pub all_right_rate: f64,
    /// Share of consistency-eligible words with no sample correct.
    pub all_wrong_rate: f64,
    /// Words with at least one pipeline error; left out of the consistency rates.
    pub words_with_pipeline_errors: usize,
    pub state_counts: BTreeMap<SampleState, usize>,
    pub error_class_counts: BTreeMap<ErrorClass, usize>,
}

impl BucketReport {
    pub fn scored_samples(&self) -> usize {
        self.n_samples - self.count(SampleState::PipelineError)
    }

    pub fn count(&self, state: SampleState) -> usize {
        self.state_counts.get(&state).copied().unwrap_or(0)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Summarizes one group of samples; every prompt must carry exactly
/// `samples_per_prompt` distinct sample indices.
pub fn summarize(bucket: Option<FrequencyBucket>, scores: &[&SampleScore], samples_per_prompt: usize) -> Result<BucketReport> {
    let mut by_prompt: BTreeMap<&str, Vec<&SampleScore>> = BTreeMap::new();
    for s in scores {
        by_prompt.entry(s.prompt_id.as_str()).or_default().push(s);
    }
    let mut report = BucketReport {
        bucket,
        n_words: by_prompt.len(),
        n_samples: scores.len(),
        state_counts: SampleState::ALL.iter().map(|&s| (s, 0)).collect(),
        ..Default::default()
    };
    for s in scores {
        *report.state_counts.get_mut(&s.state).unwrap() += 1;
        if let Some(c) = s.error_class {
            *report.error_class_counts.entry(c).or_insert(0) += 1;
        }
    }
    let (mut eligible, mut all_right, mut all_wrong) = (0, 0, 0);
    for (prompt, samples) in &by_prompt {
        let indices: BTreeSet<usize> = samples.iter().map(|s| s.sample_index).collect();
        if samples.len() != samples_per_prompt || indices.len() != samples_per_prompt {
            return Err(Error::Precondition(format!(
                "prompt {prompt} has {} samples ({} distinct), expected {samples_per_prompt}",
                samples.len(),
                indices.len()
            )));
        }
        if samples.iter().any(|s| s.state == SampleState::PipelineError) {
            report.words_with_pipeline_errors += 1;
            continue;
        }
        eligible += 1;
        let correct = samples.iter().filter(|s| s.state == SampleState::Correct).count();
        if correct == samples.len() {
            all_right += 1;
        } else if correct == 0 {
            all_wrong += 1;
        }
    }
    report.accuracy = ratio(report.count(SampleState::Correct), report.scored_samples());
    report.all_right_rate = ratio(all_right, eligible);
    report.all_wrong_rate = ratio(all_wrong, eligible);
    Ok(report)
}

/// One report per bucket present in `scores` (bucket order, unbucketed last).
pub fn per_bucket_report(scores: &[SampleScore], samples_per_prompt: usize) -> Result<Vec<BucketReport>> {
    let mut groups: BTreeMap<(u8, Option<FrequencyBucket>), Vec<&SampleScore>> = BTreeMap::new();
    for s in scores {
        let key = (u8::from(s.bucket.is_none()), s.bucket);
        groups.entry(key).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|((_, bucket), group)| summarize(bucket, &group, samples_per_prompt))
        .collect()
}

/// All samples pooled.
pub fn overall_report(scores: &[SampleScore], samples_per_prompt: usize) -> Result<BucketReport> {
    let all: Vec<&SampleScore> = scores.iter().collect();
    summarize(None, &all, samples_per_prompt)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationRate {
    pub samples: usize,
    pub tagged: usize,
    pub rate: f64,
}

/// Share of samples on irregular-verb prompts whose reading regularizes the
/// verb. Pipeline errors are left out; `None` when no prompt targets a
/// listed past form.
pub fn regularization_rate(scores: &[SampleScore], verbs: &IrregularVerbs) -> Option<RegularizationRate> {
    let pasts = verbs.past_forms();
    let relevant: Vec<&SampleScore> = scores
        .iter()
        .filter(|s| s.state != SampleState::PipelineError && pasts.contains(&fold(&s.target)))
        .collect();
    if relevant.is_empty() {
        return None;
    }
    let tagged = relevant
        .iter()
        .filter(|s| s.tags.contains(&LexicalTag::RegularizedIrregular))
        .count();
    Some(RegularizationRate {
        samples: relevant.len(),
        tagged,
        rate: tagged as f64 / relevant.len() as f64,
    })
}

/// Label for a report row.
pub fn bucket_label(bucket: Option<FrequencyBucket>) -> String {
    match bucket {
        Some(b) => String::from(b.as_str()),
        None => String::from("unbucketed"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn sample(prompt: &str, i: usize, state: SampleState) -> SampleScore {
        SampleScore {
            prompt_id: prompt.to_string(),
            sample_index: i,
            target: "word".into(),
            bucket: Some(FrequencyBucket::Top1),
            reading: None,
            state,
            error_class: None,
            tags: BTreeSet::new(),
            detail: None,
        }
    }

    fn word(prompt: &str, states: [SampleState; 4]) -> Vec<SampleScore> {
        states.iter().enumerate().map(|(i, &s)| sample(prompt, i, s)).collect()
    }

    use SampleState::*;

    #[test]
    fn accuracy_three_quarters() {
        let mut scores = Vec::new();
        for p in 0..100 {
            scores.extend(word(&format!("p{p}"), [Correct, Correct, Correct, Incorrect]));
        }
        let r = per_bucket_report(&scores, 4).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].n_samples, 400);
        assert_eq!(r[0].accuracy, 0.75);
        assert_eq!(r[0].all_right_rate, 0.0);
        assert_eq!(r[0].all_wrong_rate, 0.0);
    }

    #[test]
    fn consistency_definitions() {
        let mut scores = word("a", [Correct; 4]);
        scores.extend(word("b", [Correct, Incorrect, Incorrect, Incorrect]));
        scores.extend(word("c", [NoText, Incorrect, NoText, Incorrect]));
        scores.extend(word("d", [Correct, PipelineError, Correct, Correct]));
        let r = &per_bucket_report(&scores, 4).unwrap()[0];
        assert_eq!(r.n_words, 4);
        assert_eq!(r.words_with_pipeline_errors, 1);
        assert!((r.all_right_rate - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.all_wrong_rate - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.scored_samples(), 15);
        assert!((r.accuracy - 8.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_sample_counts_rejected() {
        let mut scores = word("a", [Correct; 4]);
        scores.pop();
        assert!(per_bucket_report(&scores, 4).is_err());
        let mut scores = word("a", [Correct; 4]);
        scores[3].sample_index = 0;
        assert!(per_bucket_report(&scores, 4).is_err());
    }

    #[test]
    fn regularization_ratio() {
        let verbs = IrregularVerbs::default();
        let mut scores = Vec::new();
        for i in 0..100 {
            let mut s = sample("p", i, Incorrect);
            s.target = "fought".into();
            if i < 11 {
                s.tags.insert(LexicalTag::RegularizedIrregular);
            }
            scores.push(s);
        }
        assert_eq!(regularization_rate(&scores, &verbs).unwrap().rate, 0.11);
        for s in &mut scores {
            s.tags.clear();
        }
        assert_eq!(regularization_rate(&scores, &verbs).unwrap().rate, 0.0);
        assert!(regularization_rate(&[sample("p", 0, Correct)], &verbs).is_none());
        assert!(regularization_rate(&[], &verbs).is_none());
    }
}
