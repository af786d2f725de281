//! Allocation-only building blocks for spelling benchmarks.
//!
//! This crate carries every algorithm that does not need an operating system:
//! word counting over in-memory documents, lexicon filtering, frequency
//! bucketing and seeded sampling, prompt generation, OCR reading selection and
//! normalization, and the scoring/aggregation arithmetic. File formats, the
//! command line, and network backends live in the `spellbench` crate.
#![no_std]

extern crate alloc;

pub mod corpus_stats;
pub mod error;
pub mod lexicon;
pub mod ocr;
pub mod prompts;
pub mod rng;
pub mod scoring;
pub mod spelling;
pub mod text;
pub mod wikispell;

pub use error::{Error, Result};

/// Version string recorded in provenance blocks and metadata sidecars.
pub const TOOLKIT_VERSION: &str = concat!("spellbench ", env!("CARGO_PKG_VERSION"));
