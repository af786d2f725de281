//! Document streams for frequency counting.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::AppResult;
use crate::fsio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DocFormat {
    /// One JSON object per line with a string `text` field (and optional `id`).
    Jsonl,
    /// One document per line.
    Text,
}

#[derive(Deserialize)]
struct JsonDoc {
    text: String,
}

/// Why a document could not be used. Such documents are tallied, not fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedDoc {
    pub line_no: usize,
    pub reason: String,
}

/// Iterator over documents; unreadable ones come out as `Err`.
pub struct DocReader<R> {
    lines: std::io::Split<R>,
    format: DocFormat,
    line_no: usize,
}

impl<R: BufRead> DocReader<R> {
    pub fn new(reader: R, format: DocFormat) -> Self {
        DocReader {
            lines: reader.split(b'\n'),
            format,
            line_no: 0,
        }
    }
}

pub fn open_docs(path: &Path, format: DocFormat) -> AppResult<DocReader<Box<dyn BufRead + Send>>> {
    let reader: Box<dyn BufRead + Send> = if path == Path::new("-") {
        Box::new(BufReader::new(std::io::stdin()))
    } else {
        Box::new(fsio::open(path)?)
    };
    Ok(DocReader::new(reader, format))
}

pub fn parse_doc(line: &[u8], format: DocFormat) -> Result<String, String> {
    let line = line.strip_suffix(b"\r").unwrap_or(line);
    let text = std::str::from_utf8(line).map_err(|e| format!("invalid UTF-8: {e}"))?;
    match format {
        DocFormat::Text => Ok(text.to_string()),
        DocFormat::Jsonl => serde_json::from_str::<JsonDoc>(text)
            .map(|d| d.text)
            .map_err(|e| format!("invalid JSON document: {e}")),
    }
}

impl<R: BufRead> Iterator for DocReader<R> {
    type Item = Result<String, SkippedDoc>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line_no = self.line_no;
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    return Some(Err(SkippedDoc {
                        line_no,
                        reason: format!("read error: {e}"),
                    }))
                }
            };
            // A blank JSONL line is not a document at all.
            if self.format == DocFormat::Jsonl && line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            return Some(parse_doc(&line, self.format).map_err(|reason| SkippedDoc { line_no, reason }));
        }
    }
}

/// Reads every document of an in-memory buffer; handy in tests.
pub fn read_all<R: Read>(reader: R, format: DocFormat) -> Vec<Result<String, SkippedDoc>> {
    DocReader::new(BufReader::new(reader), format).collect()
}
