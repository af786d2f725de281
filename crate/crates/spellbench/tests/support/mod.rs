//! Shared fixtures, oracles and helpers for the integration targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use spellbench_core::rng::SeededRng;

pub mod edit_oracle;

/// One acceptance criterion: collects failed checks and prints a single
/// status line straight to stderr so it shows even when output is captured.
pub struct Criterion {
    id: u32,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        if !ok {
            self.failures.push(what.into());
        }
        ok
    }

    pub fn eq<T: PartialEq + std::fmt::Debug>(&mut self, got: T, want: T, what: &str) -> bool {
        let ok = got == want;
        if !ok {
            self.failures.push(format!("{what}: got {got:?}, want {want:?}"));
        }
        ok
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    pub fn finish(self) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("[{status}] criterion {:>2}: {}", self.id, self.title);
        for f in &self.failures {
            line.push_str(&format!("\n         - {f}"));
        }
        for n in &self.notes {
            line.push_str(&format!("\n         note: {n}"));
        }
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "{line}");
        let _ = err.flush();
        assert!(self.failures.is_empty(), "criterion {} failed:\n{}", self.id, self.failures.join("\n"));
    }
}

/// Runs the CLI in-process.
pub fn cli<S: AsRef<str>>(args: &[S]) -> i32 {
    let mut argv = vec!["spellbench".to_string()];
    argv.extend(args.iter().map(|a| a.as_ref().to_string()));
    spellbench::cli::run(argv)
}

pub fn p(path: &Path) -> String {
    path.display().to_string()
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Distinct lowercase words, deterministic for a seed.
pub fn random_words(n: usize, seed: u64) -> Vec<String> {
    let mut rng = SeededRng::new(seed, 7);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = 3 + rng.below(8) as usize;
        let w: String = (0..len).map(|_| (b'a' + rng.below(26) as u8) as char).collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Zipf(1) sampler over ranks `0..n` by inverse CDF.
pub struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    pub fn new(n: usize) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=n)
            .map(|k| {
                acc += 1.0 / k as f64;
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        Zipf { cdf }
    }

    pub fn draw(&self, rng: &mut SeededRng) -> usize {
        let u = rng.unit_f64();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Documents of `tokens_per_doc` Zipf-distributed words joined by spaces
/// and the occasional comma.
pub fn zipf_docs(words: &[String], n_docs: usize, tokens_per_doc: usize, seed: u64) -> Vec<String> {
    let zipf = Zipf::new(words.len());
    let mut rng = SeededRng::new(seed, 11);
    (0..n_docs)
        .map(|_| {
            let mut d = String::new();
            for i in 0..tokens_per_doc {
                if i > 0 {
                    d.push_str(if rng.below(10) == 0 { ", " } else { " " });
                }
                d.push_str(&words[zipf.draw(&mut rng)]);
            }
            d
        })
        .collect()
}

pub fn write_jsonl_docs(path: &Path, docs: &[String]) {
    let mut out = String::new();
    for d in docs {
        out.push_str(&serde_json::json!({ "text": d }).to_string());
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}

/// Every regular file under `dir` with its bytes, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
