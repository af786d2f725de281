//! File formats, OCR backends, reporting and the `spellbench` command line
//! built on top of `spellbench-core`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod docs;
pub mod error;
pub mod freq;
pub mod fsio;
pub mod lexicon_io;
pub mod manifest;
pub mod ocr;
pub mod report;
pub mod runmeta;
pub mod score;
pub mod sheets;

pub use error::{AppError, AppResult};
pub use spellbench_core as core;
