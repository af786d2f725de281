//! Report bundle: JSON for machines, aligned text for people, and CSV plot
//! data with buckets as rows and models as columns.
//!
//! Everything in the bundle is derived from the scores files (plus the
//! validation sheet and ratings when given), so a bundle can always be
//! regenerated from its inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spellbench_core::scoring::prefs::{aggregate_preferences, PreferenceRecord, PreferenceReport};
use spellbench_core::scoring::report::{
    bucket_label, overall_report, per_bucket_report, regularization_rate, BucketReport, RegularizationRate,
};
use spellbench_core::scoring::validation::{apply_validation, ValidationOutcome, ValidationRow};
use spellbench_core::scoring::{ErrorClass, IrregularVerbs, SampleScore, SampleState};
use spellbench_core::wikispell::FrequencyBucket;
use spellbench_core::TOOLKIT_VERSION;

use crate::error::AppResult;
use crate::fsio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub overall: BucketReport,
    pub buckets: Vec<BucketReport>,
    pub regularization: Option<RegularizationRate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub toolkit_version: String,
    pub samples_per_prompt: usize,
    pub models: BTreeMap<String, ModelReport>,
    pub validation: Vec<ValidationOutcome>,
    pub preferences: Option<PreferenceReport>,
    pub notices: Vec<String>,
}

pub struct ReportInputs<'a> {
    pub models: &'a BTreeMap<String, Vec<SampleScore>>,
    pub samples_per_prompt: usize,
    pub verbs: &'a IrregularVerbs,
    pub validation_sheet: Option<&'a [ValidationRow]>,
    pub ratings: Option<&'a [PreferenceRecord]>,
}

pub fn build_report(inputs: &ReportInputs<'_>) -> AppResult<ReportBundle> {
    let spp = inputs.samples_per_prompt;
    let models: Vec<(String, ModelReport)> = inputs
        .models
        .par_iter()
        .map(|(name, scores)| -> AppResult<_> {
            Ok((
                name.clone(),
                ModelReport {
                    overall: overall_report(scores, spp)?,
                    buckets: per_bucket_report(scores, spp)?,
                    regularization: regularization_rate(scores, inputs.verbs),
                },
            ))
        })
        .collect::<AppResult<_>>()?;
    let models: BTreeMap<String, ModelReport> = models.into_iter().collect();

    let mut notices = Vec::new();
    for (name, m) in &models {
        if m.overall.n_samples == 0 {
            notices.push(format!("model {name}: scores file is empty"));
            continue;
        }
        let present: BTreeSet<Option<FrequencyBucket>> = m.buckets.iter().map(|b| b.bucket).collect();
        for b in FrequencyBucket::ALL {
            if !present.contains(&Some(b)) {
                notices.push(format!("model {name}: no samples in bucket {}; row omitted", b.as_str()));
            }
        }
        if m.regularization.is_none() {
            notices.push(format!("model {name}: no prompts target a listed irregular past form"));
        }
    }

    let mut validation = Vec::new();
    if let Some(sheet) = inputs.validation_sheet {
        let sheet_models: BTreeSet<&str> = sheet.iter().map(|r| r.model.as_str()).collect();
        for model in sheet_models {
            let Some(m) = models.get(model) else {
                notices.push(format!("validation sheet model {model} has no scores; skipped"));
                continue;
            };
            let rows: Vec<ValidationRow> = sheet.iter().filter(|r| r.model == model).cloned().collect();
            validation.push(apply_validation(model, m.overall.accuracy, &rows)?);
        }
    }
    let preferences = inputs.ratings.map(aggregate_preferences).transpose()?;

    Ok(ReportBundle {
        toolkit_version: TOOLKIT_VERSION.to_string(),
        samples_per_prompt: spp,
        models,
        validation,
        preferences,
        notices,
    })
}

/// Text table with the first column left-aligned and the rest right-aligned.
pub fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = vec![0usize; cols];
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut l = String::new();
        for (i, (cell, w)) in cells.iter().zip(&width).enumerate() {
            if i == 0 {
                write!(l, "{cell:<w$}").unwrap();
            } else {
                write!(l, "  {cell:>w$}").unwrap();
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header);
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    line(&rule);
    for r in rows {
        line(r);
    }
    out
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

pub fn render_text(bundle: &ReportBundle) -> String {
    let mut out = format!("{}\nsamples per prompt: {}\n", bundle.toolkit_version, bundle.samples_per_prompt);
    for (name, m) in &bundle.models {
        writeln!(out, "\n== model {name} ==").unwrap();
        let header: Vec<String> = [
            "bucket", "words", "samples", "accuracy", "all_right", "all_wrong", "correct", "incorrect", "no_text",
            "pipeline_err",
        ]
        .map(String::from)
        .to_vec();
        let row = |label: String, b: &BucketReport| {
            vec![
                label,
                s(b.n_words),
                s(b.n_samples),
                f4(b.accuracy),
                f4(b.all_right_rate),
                f4(b.all_wrong_rate),
                s(b.count(SampleState::Correct)),
                s(b.count(SampleState::Incorrect)),
                s(b.count(SampleState::NoText)),
                s(b.count(SampleState::PipelineError)),
            ]
        };
        let mut rows: Vec<Vec<String>> = m.buckets.iter().map(|b| row(bucket_label(b.bucket), b)).collect();
        rows.push(row("all".into(), &m.overall));
        out.push_str(&render_table(&header, &rows));

        let mut header = vec![String::from("bucket")];
        header.extend(ErrorClass::ALL.iter().map(|c| c.as_str().to_string()));
        let hist = |label: String, b: &BucketReport| {
            let mut r = vec![label];
            r.extend(ErrorClass::ALL.iter().map(|c| s(b.error_class_counts.get(c).copied().unwrap_or(0))));
            r
        };
        let mut rows: Vec<Vec<String>> = m.buckets.iter().map(|b| hist(bucket_label(b.bucket), b)).collect();
        rows.push(hist("all".into(), &m.overall));
        writeln!(out, "\nerror classes").unwrap();
        out.push_str(&render_table(&header, &rows));
        if let Some(r) = &m.regularization {
            writeln!(out, "\nirregular-verb regularization: {}/{} = {}", r.tagged, r.samples, f4(r.rate)).unwrap();
        }
    }
    if !bundle.validation.is_empty() {
        writeln!(out, "\n== OCR validation ==").unwrap();
        let header = ["model", "measured", "fn", "fp", "adjusted", "labeled_c", "labeled_i"].map(String::from);
        let rows: Vec<Vec<String>> = bundle
            .validation
            .iter()
            .map(|v| {
                vec![
                    v.model.clone(),
                    f4(v.measured_accuracy),
                    f4(v.false_negative_rate),
                    f4(v.false_positive_rate),
                    f4(v.adjusted_accuracy),
                    s(v.labeled_ocr_correct),
                    s(v.labeled_ocr_incorrect),
                ]
            })
            .collect();
        out.push_str(&render_table(&header, &rows));
    }
    if let Some(p) = &bundle.preferences {
        out.push_str(&render_preferences(p));
    }
    if !bundle.notices.is_empty() {
        writeln!(out, "\nnotices").unwrap();
        for n in &bundle.notices {
            writeln!(out, "- {n}").unwrap();
        }
    }
    out
}

pub fn render_preferences(p: &PreferenceReport) -> String {
    let mut out = String::from("\n== preference for A ==\n");
    let header = ["question", "category", "prompts", "ratings", "rate", "ci_low", "ci_high"].map(String::from);
    let mut rows = Vec::new();
    for (q, r) in &p.by_question {
        let row = |cat: &str, r: &spellbench_core::scoring::prefs::PreferenceRate| {
            vec![
                q.as_str().to_string(),
                cat.to_string(),
                s(r.n_prompts),
                s(r.n_ratings),
                f4(r.rate),
                f4(r.ci_low),
                f4(r.ci_high),
            ]
        };
        rows.push(row("(all)", r));
        for (cat, r) in p.by_category.get(q).into_iter().flatten() {
            rows.push(row(cat, r));
        }
    }
    out.push_str(&render_table(&header, &rows));
    out
}

/// `bucket,<model>...` with one row per bucket seen in any model.
pub fn render_plot_csv(bundle: &ReportBundle, metric: fn(&BucketReport) -> f64) -> String {
    let mut buckets: BTreeSet<(u8, Option<FrequencyBucket>)> = BTreeSet::new();
    for m in bundle.models.values() {
        buckets.extend(m.buckets.iter().map(|b| (u8::from(b.bucket.is_none()), b.bucket)));
    }
    let mut out = String::from("bucket");
    for name in bundle.models.keys() {
        out.push(',');
        out.push_str(&csv_cell(name));
    }
    out.push('\n');
    for (_, bucket) in buckets {
        out.push_str(&bucket_label(bucket));
        for m in bundle.models.values() {
            out.push(',');
            if let Some(b) = m.buckets.iter().find(|b| b.bucket == bucket) {
                write!(out, "{}", metric(b)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub type PlotColumn = fn(&BucketReport) -> f64;

pub const PLOTS: [(&str, PlotColumn); 3] = [
    ("plot_accuracy.csv", |b| b.accuracy),
    ("plot_all_right.csv", |b| b.all_right_rate),
    ("plot_all_wrong.csv", |b| b.all_wrong_rate),
];

pub fn render_bundle(bundle: &ReportBundle) -> AppResult<Vec<(&'static str, Vec<u8>)>> {
    let mut files = vec![
        ("report.json", fsio::to_json_pretty(bundle)?),
        ("report.txt", render_text(bundle).into_bytes()),
    ];
    for (name, metric) in PLOTS {
        files.push((name, render_plot_csv(bundle, metric).into_bytes()));
    }
    Ok(files)
}

pub fn write_bundle(bundle: &ReportBundle, dir: &Path) -> AppResult<()> {
    fsio::create_dir(dir)?;
    for (name, bytes) in render_bundle(bundle)? {
        fsio::write_atomic(&dir.join(name), &bytes)?;
    }
    Ok(())
}
