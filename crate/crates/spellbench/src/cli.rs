//! Command-line entry point.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use spellbench_core::corpus_stats::{CountingMode, LangConfig};
use spellbench_core::prompts::{
    build_manifest, gen_spelling_prompts, load_creative_from, load_creative_prompts, DEFAULT_SAMPLES_PER_PROMPT,
    DEFAULT_TEMPLATE, DEFAULT_WORDS_PER_BUCKET,
};
use spellbench_core::scoring::report::overall_report;
use spellbench_core::scoring::validation::{plan_validation, DEFAULT_PER_VERDICT};
use spellbench_core::scoring::{classify_error, edit_script, match_spelling, MatchOptions, SampleState};
use spellbench_core::wikispell::{build_wikispell, SamplingSpec, Split};

use crate::config;
use crate::dataset;
use crate::docs::{open_docs, DocFormat};
use crate::error::{AppError, AppResult, ResultExt};
use crate::freq::{self, CountJob, DEFAULT_BATCH_DOCS};
use crate::fsio;
use crate::lexicon_io;
use crate::manifest::{self, ManifestMeta};
use crate::ocr::backend::{
    credential_from_env, run_ocr, HttpBackend, HttpConfig, OcrBackend, PrecomputedBackend, ResponseFormat,
    DEFAULT_CONCURRENCY, DEFAULT_CREDENTIAL_ENV,
};
use crate::ocr::{self, OcrTally};
use crate::report::{self, ReportInputs};
use crate::runmeta::{self, RunClock};
use crate::score::{self, ModelScores};
use crate::sheets;

#[derive(Debug, Parser)]
#[command(name = "spellbench", version, about = "Build spelling benchmarks and score rendered-text images")]
pub struct Cli {
    /// TOML file with one table of flag values per subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Where to write run metadata (default: `<output>.run.json`).
    #[arg(long, global = true, value_name = "PATH")]
    pub run_meta: Option<PathBuf>,
    /// Skip the run metadata sidecar.
    #[arg(long, global = true)]
    pub no_run_meta: bool,
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Count word frequencies over a document corpus.
    CountFreq(CountFreqArgs),
    /// Apply the headword exclusion rules to a lexicon TSV.
    FilterLexicon(FilterLexiconArgs),
    /// Bucket a kept lexicon by frequency and sample the spelling splits.
    BuildWikispell(BuildWikispellArgs),
    /// Sample spelling prompts from a dataset and write an image manifest.
    GenPrompts(GenPromptsArgs),
    /// Write a manifest for the shipped creative prompt corpus.
    LoadCreative(LoadCreativeArgs),
    /// Run OCR over a manifest's images.
    Ocr(OcrArgs),
    /// Score OCR readings against manifest targets.
    Score(ScoreArgs),
    /// Classify misspellings given on the command line or in a TSV.
    Classify(ClassifyArgs),
    /// Draw a balanced manual-validation sheet from scores.
    ValidatePlan(ValidatePlanArgs),
    /// Compute OCR error rates and corrected accuracy from a labeled sheet.
    ValidateApply(ValidateApplyArgs),
    /// Aggregate side-by-side human ratings.
    Prefs(PrefsArgs),
    /// Write the report bundle for one or more models.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CountFreq(_) => "count-freq",
            Command::FilterLexicon(_) => "filter-lexicon",
            Command::BuildWikispell(_) => "build-wikispell",
            Command::GenPrompts(_) => "gen-prompts",
            Command::LoadCreative(_) => "load-creative",
            Command::Ocr(_) => "ocr",
            Command::Score(_) => "score",
            Command::Classify(_) => "classify",
            Command::ValidatePlan(_) => "validate-plan",
            Command::ValidateApply(_) => "validate-apply",
            Command::Prefs(_) => "prefs",
            Command::Report(_) => "report",
        }
    }
}

fn parse_mode(s: &str) -> Result<CountingMode, String> {
    CountingMode::parse(s).ok_or_else(|| format!("expected delimited or doc-substring, got {s:?}"))
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::parse(s).ok_or_else(|| format!("expected train, dev or test, got {s:?}"))
}

#[derive(Debug, Args, Serialize)]
pub struct CountFreqArgs {
    /// Corpus file (`-` for standard input).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: DocFormat,
    /// Language code; picks the default counting mode and document limit.
    #[arg(long)]
    pub lang: String,
    /// Override the counting mode (delimited or doc-substring).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<CountingMode>,
    /// Candidate words for doc-substring counting (first column per line).
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Maximum documents to read.
    #[arg(long, conflicts_with = "no_doc_limit")]
    pub doc_limit: Option<u64>,
    /// Read the whole corpus.
    #[arg(long)]
    pub no_doc_limit: bool,
    /// Case-fold tokens and candidates before counting.
    #[arg(long)]
    pub fold_case: bool,
    /// Replace the default delimiter characters (whitespace always splits).
    #[arg(long)]
    pub delimiters: Option<String>,
    /// Corpus identifier recorded in the table (default: input file name).
    #[arg(long)]
    pub corpus_id: Option<String>,
    /// Creation stamp recorded in the table (default: SOURCE_DATE_EPOCH, else the input's mtime).
    #[arg(long)]
    pub created: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BATCH_DOCS)]
    pub batch_docs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterLexiconArgs {
    /// `headword<TAB>language<TAB>pos1|pos2` rows.
    #[arg(long)]
    pub input: PathBuf,
    /// Keep only this language (required when the file mixes languages).
    #[arg(long)]
    pub lang: Option<String>,
    /// Kept headwords, one per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Exclusion report (JSON).
    #[arg(long)]
    pub report: PathBuf,
    /// Optional `headword<TAB>reason` list of excluded entries.
    #[arg(long)]
    pub excluded: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildWikispellArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub freq: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub eval_per_bucket: usize,
    #[arg(long, default_value_t = 5000)]
    pub train_uniform: usize,
    #[arg(long, default_value_t = 5000)]
    pub train_weighted: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GenPromptsArgs {
    /// Dataset directory written by build-wikispell.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Which held-out split supplies the words.
    #[arg(long, value_parser = parse_split, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = DEFAULT_WORDS_PER_BUCKET)]
    pub words_per_bucket: usize,
    #[arg(long, default_value = DEFAULT_TEMPLATE)]
    pub template: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_PROMPT)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LoadCreativeArgs {
    /// Use this corpus file instead of the shipped one.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Expected SHA-256 of `--corpus` (default: read `<corpus>.sha256`).
    #[arg(long, requires = "corpus")]
    pub sha256: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_PROMPT)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Precomputed,
    Http,
}

#[derive(Debug, Args, Serialize)]
pub struct OcrArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum)]
    pub backend: BackendKind,
    /// Response format produced by the backend.
    #[arg(long, value_enum, default_value = "neutral")]
    pub format: ResponseFormat,
    /// Directory of precomputed responses (`<image_path>.json`).
    #[arg(long, required_if_eq("backend", "precomputed"))]
    pub responses: Option<PathBuf>,
    /// HTTP endpoint receiving one POST per image.
    #[arg(long, required_if_eq("backend", "http"))]
    pub endpoint: Option<String>,
    /// Root that manifest image paths are relative to (default: the manifest's directory).
    #[arg(long)]
    pub images_root: Option<PathBuf>,
    /// Environment variable holding the bearer credential.
    #[arg(long, default_value = DEFAULT_CREDENTIAL_ENV)]
    pub credential_env: String,
    #[arg(long, default_value_t = 30.0)]
    pub timeout_secs: f64,
    #[arg(long, default_value_t = 3)]
    pub max_retries: u32,
    /// First retry delay; doubles on each further retry.
    #[arg(long, default_value_t = 500)]
    pub backoff_ms: u64,
    /// Maximum requests in flight.
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY)]
    pub concurrency: usize,
    /// Where raw HTTP responses are kept (default: `<out>.raw/`).
    #[arg(long)]
    pub raw_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub ocr: PathBuf,
    /// Irregular verb list (`root<TAB>past` per line) replacing the shipped one.
    #[arg(long)]
    pub verbs: Option<PathBuf>,
    /// Ignore punctuation and symbols at either end of a reading.
    #[arg(long)]
    pub strip_edge_punct: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long, requires = "reading", conflicts_with = "pairs")]
    pub target: Option<String>,
    #[arg(long, requires = "target")]
    pub reading: Option<String>,
    /// `target<TAB>reading` per line.
    #[arg(long, required_unless_present = "target")]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub verbs: Option<PathBuf>,
    /// Write JSON Lines here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidatePlanArgs {
    /// `MODEL=PATH` scores file; repeat for several models.
    #[arg(long, required = true)]
    pub scores: Vec<ModelScores>,
    #[arg(long, default_value_t = DEFAULT_PER_VERDICT)]
    pub per_verdict: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateApplyArgs {
    /// Labeled validation sheet.
    #[arg(long)]
    pub sheet: PathBuf,
    /// `MODEL=PATH` scores files the measured accuracy comes from.
    #[arg(long, required = true)]
    pub scores: Vec<ModelScores>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_PROMPT)]
    pub samples: usize,
    /// JSON output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PrefsArgs {
    /// CSV with `prompt_id,category,question,rater_id,choice`.
    #[arg(long)]
    pub ratings: PathBuf,
    /// JSON output; without it a table goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// `MODEL=PATH` scores file; repeat for several models.
    #[arg(long, required = true)]
    pub scores: Vec<ModelScores>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_PROMPT)]
    pub samples: usize,
    #[arg(long)]
    pub verbs: Option<PathBuf>,
    /// Labeled validation sheet to include.
    #[arg(long)]
    pub validation_sheet: Option<PathBuf>,
    /// Ratings CSV to include.
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a command touched, for the run metadata.
#[derive(Default)]
struct Done {
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    /// Output the metadata sidecar is placed next to.
    primary: Option<PathBuf>,
    summary: serde_json::Value,
}

fn created_stamp(args: &CountFreqArgs) -> String {
    if let Some(c) = &args.created {
        return c.clone();
    }
    let from_epoch = |secs: i64| chrono::DateTime::from_timestamp(secs, 0).map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    if let Some(stamp) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()).and_then(from_epoch) {
        return stamp;
    }
    std::fs::metadata(&args.input)
        .and_then(|m| m.modified())
        .map(|t| chrono::DateTime::<chrono::Utc>::from(t).to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .unwrap_or_else(|_| runmeta::now_rfc3339())
}

fn count_freq(a: &CountFreqArgs) -> AppResult<Done> {
    let mut config = LangConfig::for_language(&a.lang);
    if let Some(m) = a.mode {
        config.counting_mode = m;
    }
    if a.no_doc_limit {
        config.doc_limit = None;
    } else if let Some(l) = a.doc_limit {
        config.doc_limit = Some(l);
    }
    config.case_sensitive = !a.fold_case;
    if let Some(d) = &a.delimiters {
        config.delimiters = d.chars().collect();
    }
    let words = a.words.as_deref().map(freq::read_word_list).transpose()?;
    let corpus_id = a.corpus_id.clone().unwrap_or_else(|| {
        a.input
            .file_name()
            .map_or_else(|| "stdin".to_string(), |n| n.to_string_lossy().to_string())
    });
    let job = CountJob {
        config,
        corpus_id,
        created: created_stamp(a),
        words,
        shards: rayon::current_num_threads(),
        batch_docs: a.batch_docs,
    };
    let table = freq::count_documents(open_docs(&a.input, a.format)?, &job)?;
    freq::write_table(&table, &a.out)?;
    if table.provenance.skipped_docs > 0 {
        log::warn!("{} unreadable documents were skipped", table.provenance.skipped_docs);
    }
    log::info!("{} documents, {} distinct words", table.docs_processed, table.entries.len());
    let mut inputs = vec![a.input.clone()];
    inputs.extend(a.words.clone());
    Ok(Done {
        inputs,
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: json!({
            "docs_processed": table.docs_processed,
            "skipped_docs": table.provenance.skipped_docs,
            "distinct_words": table.entries.len(),
            "counting_mode": table.counting_mode.as_str(),
        }),
        ..Default::default()
    })
}

fn filter_lexicon(a: &FilterLexiconArgs) -> AppResult<Done> {
    let text = fsio::read_string(&a.input)?;
    let f = lexicon_io::filter_lexicon(&text, a.lang.as_deref())?;
    fsio::write_atomic(&a.out, lexicon_io::render_kept(&f.outcome).as_bytes())?;
    fsio::write_atomic(&a.report, &fsio::to_json_pretty(&f.report)?)?;
    let mut outputs = vec![a.out.clone(), a.report.clone()];
    if let Some(p) = &a.excluded {
        fsio::write_atomic(p, lexicon_io::render_excluded(&f.outcome).as_bytes())?;
        outputs.push(p.clone());
    }
    log::info!("kept {} of {} entries", f.report.total_kept, f.report.total_in);
    Ok(Done {
        inputs: vec![a.input.clone()],
        outputs,
        primary: Some(a.out.clone()),
        summary: serde_json::to_value(&f.report).unwrap_or_default(),
        ..Default::default()
    })
}

fn build_wikispell_cmd(a: &BuildWikispellArgs) -> AppResult<Done> {
    let words = lexicon_io::read_kept(&a.lexicon)?;
    let table = freq::read_table(&a.freq)?;
    let spec = SamplingSpec {
        seed: a.seed,
        eval_per_bucket: a.eval_per_bucket,
        train_uniform: a.train_uniform,
        train_weighted: a.train_weighted,
    };
    let ds = build_wikispell(&words, &table, &spec)?;
    for w in &ds.metadata.warnings {
        log::warn!("{w}");
    }
    let inputs = BTreeMap::from([
        ("lexicon_sha256".to_string(), fsio::sha256_file(&a.lexicon)?),
        ("freq_sha256".to_string(), fsio::sha256_file(&a.freq)?),
    ]);
    dataset::write_dataset(&ds, &inputs, &a.out)?;
    Ok(Done {
        seed: Some(a.seed),
        inputs: vec![a.lexicon.clone(), a.freq.clone()],
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: json!({ "split_sizes": ds.metadata.split_sizes, "warnings": ds.metadata.warnings }),
    })
}

fn gen_prompts(a: &GenPromptsArgs) -> AppResult<Done> {
    let words = dataset::read_split_words(&a.dataset, a.split)?;
    let prompts = gen_spelling_prompts(&words, a.words_per_bucket, &a.template, a.seed)?;
    let rows = build_manifest(&prompts, a.samples)?;
    let assignments = a.dataset.join(dataset::ASSIGNMENTS_FILE);
    let meta = ManifestMeta {
        kind: "spelling".into(),
        n_prompts: prompts.len(),
        n_rows: rows.len(),
        samples_per_prompt: a.samples,
        seed: Some(a.seed),
        template: Some(a.template.clone()),
        words_per_bucket: Some(a.words_per_bucket),
        source_split: Some(a.split.as_str().to_string()),
        inputs: BTreeMap::from([("assignments_sha256".to_string(), fsio::sha256_file(&assignments)?)]),
        toolkit_version: spellbench_core::TOOLKIT_VERSION.to_string(),
    };
    manifest::write_manifest(&rows, &meta, &a.out)?;
    Ok(Done {
        seed: Some(a.seed),
        inputs: vec![assignments],
        outputs: vec![a.out.clone(), manifest::meta_path(&a.out)],
        primary: Some(a.out.clone()),
        summary: json!({ "prompts": prompts.len(), "rows": rows.len() }),
    })
}

fn load_creative(a: &LoadCreativeArgs) -> AppResult<Done> {
    let (prompts, sha, inputs) = match &a.corpus {
        None => (load_creative_prompts()?, spellbench_core::prompts::CREATIVE_CORPUS_SHA256.trim().to_string(), vec![]),
        Some(path) => {
            let text = fsio::read_string(path)?;
            let expected = match &a.sha256 {
                Some(s) => s.clone(),
                None => fsio::read_string(&fsio::sidecar(path, ".sha256"))?,
            };
            (load_creative_from(&text, &expected)?, expected.trim().to_string(), vec![path.clone()])
        }
    };
    let rows = build_manifest(&prompts, a.samples)?;
    let meta = ManifestMeta {
        kind: "creative".into(),
        n_prompts: prompts.len(),
        n_rows: rows.len(),
        samples_per_prompt: a.samples,
        seed: None,
        template: None,
        words_per_bucket: None,
        source_split: None,
        inputs: BTreeMap::from([("corpus_sha256".to_string(), sha)]),
        toolkit_version: spellbench_core::TOOLKIT_VERSION.to_string(),
    };
    manifest::write_manifest(&rows, &meta, &a.out)?;
    let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &prompts {
        *classes.entry(p.length_class.map_or("none", |c| c.as_str())).or_insert(0) += 1;
    }
    Ok(Done {
        inputs,
        outputs: vec![a.out.clone(), manifest::meta_path(&a.out)],
        primary: Some(a.out.clone()),
        summary: json!({ "prompts": prompts.len(), "rows": rows.len(), "length_classes": classes }),
        ..Default::default()
    })
}

fn ocr_cmd(a: &OcrArgs) -> AppResult<Done> {
    let rows = manifest::read_manifest(&a.manifest)?;
    let backend: Box<dyn OcrBackend> = match a.backend {
        BackendKind::Precomputed => Box::new(PrecomputedBackend {
            dir: a.responses.clone().ok_or_else(|| AppError::user("--responses is required for the precomputed backend"))?,
            format: a.format,
        }),
        BackendKind::Http => {
            let endpoint = a.endpoint.clone().ok_or_else(|| AppError::user("--endpoint is required for the http backend"))?;
            let credential = credential_from_env(&a.credential_env)?;
            if !(a.timeout_secs.is_finite() && a.timeout_secs > 0.0) {
                return Err(AppError::user("--timeout-secs must be positive"));
            }
            let images_root = a.images_root.clone().unwrap_or_else(|| {
                a.manifest.parent().map(Path::to_path_buf).unwrap_or_default()
            });
            Box::new(HttpBackend::new(HttpConfig {
                endpoint,
                credential,
                timeout: Duration::from_secs_f64(a.timeout_secs),
                max_retries: a.max_retries,
                backoff: Duration::from_millis(a.backoff_ms),
                format: a.format,
                images_root,
                raw_dir: a.raw_dir.clone().unwrap_or_else(|| fsio::sidecar(&a.out, ".raw")),
            }))
        }
    };
    let results = run_ocr(&rows, backend.as_ref(), a.concurrency)?;
    ocr::write_ocr_jsonl(&results, &a.out)?;
    let tally = OcrTally::of(&results);
    log::info!(
        "{} images: {} with text, {} without, {} failed",
        tally.total(),
        tally.reading,
        tally.no_text,
        tally.pipeline_error
    );
    Ok(Done {
        inputs: vec![a.manifest.clone()],
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: serde_json::to_value(tally).unwrap_or_default(),
        ..Default::default()
    })
}

fn score_cmd(a: &ScoreArgs) -> AppResult<Done> {
    let rows = manifest::read_manifest(&a.manifest)?;
    let results = ocr::index_results(ocr::read_ocr_jsonl(&a.ocr)?)?;
    let verbs = score::load_verbs(a.verbs.as_deref())?;
    let options = MatchOptions {
        strip_edge_punct: a.strip_edge_punct,
    };
    let (scores, summary) = score::score_manifest(&rows, &results, &verbs, options);
    if summary.skipped_without_target > 0 {
        log::warn!("{} manifest rows have no target text and were not scored", summary.skipped_without_target);
    }
    if summary.missing_ocr > 0 {
        log::warn!("{} images have no OCR result; scored as pipeline errors", summary.missing_ocr);
    }
    score::write_scores(&scores, &a.out)?;
    let mut inputs = vec![a.manifest.clone(), a.ocr.clone()];
    inputs.extend(a.verbs.clone());
    Ok(Done {
        inputs,
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: serde_json::to_value(summary).unwrap_or_default(),
        ..Default::default()
    })
}

fn classify_cmd(a: &ClassifyArgs) -> AppResult<Done> {
    let verbs = score::load_verbs(a.verbs.as_deref())?;
    let pairs: Vec<(String, String)> = match (&a.target, &a.reading, &a.pairs) {
        (Some(t), Some(r), _) => vec![(t.clone(), r.clone())],
        (_, _, Some(path)) => fsio::read_string(path)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| {
                l.split_once('\t')
                    .map(|(t, r)| (t.to_string(), r.to_string()))
                    .ok_or_else(|| AppError::user(format!("{} line {}: expected target<TAB>reading", path.display(), n + 1)))
            })
            .collect::<AppResult<_>>()?,
        _ => return Err(AppError::user("give --target and --reading, or --pairs")),
    };
    let mut out = Vec::new();
    for (t, r) in &pairs {
        let state = match_spelling(t, Some(r));
        let value = if state == SampleState::Correct {
            json!({ "target": t, "reading": r, "state": state, "error_class": null, "tags": [] })
        } else {
            let (class, tags) = classify_error(t, r, &verbs)?;
            let script = edit_script(&spellbench_core::text::fold(t), &spellbench_core::text::fold(r));
            json!({
                "target": t,
                "reading": r,
                "state": state,
                "error_class": class,
                "tags": tags,
                "edit_distance": script.cost(),
                "script": script.steps,
            })
        };
        serde_json::to_writer(&mut out, &value).internal_err("cannot serialize")?;
        out.push(b'\n');
    }
    match &a.out {
        Some(p) => fsio::write_atomic(p, &out)?,
        None => std::io::stdout().write_all(&out).internal_err("cannot write to standard output")?,
    }
    Ok(Done {
        inputs: a.pairs.iter().cloned().collect(),
        outputs: a.out.iter().cloned().collect(),
        primary: a.out.clone(),
        summary: json!({ "pairs": pairs.len() }),
        ..Default::default()
    })
}

fn validate_plan(a: &ValidatePlanArgs) -> AppResult<Done> {
    let models = score::load_models(&a.scores)?;
    let plan = plan_validation(&models, a.per_verdict, a.seed);
    for w in &plan.warnings {
        log::warn!("{w}");
    }
    sheets::write_validation_sheet(&plan.rows, &a.out)?;
    Ok(Done {
        seed: Some(a.seed),
        inputs: a.scores.iter().map(|s| s.path.clone()).collect(),
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: json!({ "rows": plan.rows.len(), "warnings": plan.warnings }),
    })
}

fn validate_apply(a: &ValidateApplyArgs) -> AppResult<Done> {
    let models = score::load_models(&a.scores)?;
    let sheet = sheets::read_validation_sheet(&a.sheet)?;
    let mut outcomes = Vec::new();
    for (model, scores) in &models {
        let rows: Vec<_> = sheet.iter().filter(|r| &r.model == model).cloned().collect();
        if rows.is_empty() {
            log::warn!("validation sheet has no rows for model {model}");
            continue;
        }
        let acc = overall_report(scores, a.samples)?.accuracy;
        outcomes.push(spellbench_core::scoring::validation::apply_validation(model, acc, &rows)?);
    }
    for m in sheet.iter().map(|r| r.model.as_str()).collect::<std::collections::BTreeSet<_>>() {
        if !models.contains_key(m) {
            log::warn!("validation sheet model {m} has no scores file; skipped");
        }
    }
    let bytes = fsio::to_json_pretty(&outcomes)?;
    match &a.out {
        Some(p) => fsio::write_atomic(p, &bytes)?,
        None => std::io::stdout().write_all(&bytes).internal_err("cannot write to standard output")?,
    }
    let mut inputs = vec![a.sheet.clone()];
    inputs.extend(a.scores.iter().map(|s| s.path.clone()));
    Ok(Done {
        inputs,
        outputs: a.out.iter().cloned().collect(),
        primary: a.out.clone(),
        summary: serde_json::to_value(&outcomes).unwrap_or_default(),
        ..Default::default()
    })
}

fn prefs_cmd(a: &PrefsArgs) -> AppResult<Done> {
    let records = sheets::read_ratings(&a.ratings)?;
    let rep = spellbench_core::scoring::prefs::aggregate_preferences(&records)?;
    match &a.out {
        Some(p) => fsio::write_atomic(p, &fsio::to_json_pretty(&rep)?)?,
        None => std::io::stdout()
            .write_all(report::render_preferences(&rep).trim_start().as_bytes())
            .internal_err("cannot write to standard output")?,
    }
    Ok(Done {
        inputs: vec![a.ratings.clone()],
        outputs: a.out.iter().cloned().collect(),
        primary: a.out.clone(),
        summary: json!({ "ratings": records.len() }),
        ..Default::default()
    })
}

fn report_cmd(a: &ReportArgs) -> AppResult<Done> {
    let models = score::load_models(&a.scores)?;
    let verbs = score::load_verbs(a.verbs.as_deref())?;
    let sheet = a.validation_sheet.as_deref().map(sheets::read_validation_sheet).transpose()?;
    let ratings = a.ratings.as_deref().map(sheets::read_ratings).transpose()?;
    let bundle = report::build_report(&ReportInputs {
        models: &models,
        samples_per_prompt: a.samples,
        verbs: &verbs,
        validation_sheet: sheet.as_deref(),
        ratings: ratings.as_deref(),
    })?;
    for n in &bundle.notices {
        log::warn!("{n}");
    }
    report::write_bundle(&bundle, &a.out)?;
    let mut inputs: Vec<PathBuf> = a.scores.iter().map(|s| s.path.clone()).collect();
    inputs.extend(a.verbs.clone());
    inputs.extend(a.validation_sheet.clone());
    inputs.extend(a.ratings.clone());
    Ok(Done {
        inputs,
        outputs: vec![a.out.clone()],
        primary: Some(a.out.clone()),
        summary: json!({ "models": models.len(), "notices": bundle.notices.len() }),
        ..Default::default()
    })
}

fn dispatch(cmd: &Command) -> AppResult<Done> {
    match cmd {
        Command::CountFreq(a) => count_freq(a),
        Command::FilterLexicon(a) => filter_lexicon(a),
        Command::BuildWikispell(a) => build_wikispell_cmd(a),
        Command::GenPrompts(a) => gen_prompts(a),
        Command::LoadCreative(a) => load_creative(a),
        Command::Ocr(a) => ocr_cmd(a),
        Command::Score(a) => score_cmd(a),
        Command::Classify(a) => classify_cmd(a),
        Command::ValidatePlan(a) => validate_plan(a),
        Command::ValidateApply(a) => validate_apply(a),
        Command::Prefs(a) => prefs_cmd(a),
        Command::Report(a) => report_cmd(a),
    }
}

fn execute(cli: &Cli, config_file: Option<&Path>) -> AppResult<()> {
    let clock = RunClock::start();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(AppError::user("--workers must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().internal_err("cannot start worker pool")?;
    let workers = pool.current_num_threads();
    let done = pool.install(|| dispatch(&cli.command))?;
    if cli.no_run_meta {
        return Ok(());
    }
    let Some(meta_path) = cli
        .run_meta
        .clone()
        .or_else(|| done.primary.as_deref().map(|p| fsio::sidecar(p, ".run.json")))
    else {
        return Ok(());
    };
    let effective = serde_json::to_value(&cli.command).internal_err("cannot serialize configuration")?;
    let meta = runmeta::finish(
        clock,
        cli.command.name(),
        done.seed,
        workers,
        config_file,
        effective,
        &done.inputs,
        &done.outputs,
        done.summary,
    )?;
    fsio::write_atomic(&meta_path, &fsio::to_json_pretty(&meta)?)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status: 0 on success, 1 for usage, input or configuration
/// errors, 2 for internal failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let (args, config_file) = match config::expand_args(args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    // the logger is process-wide, so the level is applied per invocation
    if std::env::var_os("RUST_LOG").is_none() {
        log::set_max_level(if cli.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info });
    }
    match std::panic::catch_unwind(|| execute(&cli, config_file.as_deref())) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure (panic); please report this");
            2
        }
    }
}
