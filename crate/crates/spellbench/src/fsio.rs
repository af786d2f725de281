//! Small filesystem helpers shared by the commands.

use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{AppResult, ResultExt};

pub fn read_string(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).user_err(format!("cannot read {}", path.display()))
}

pub fn open(path: &Path) -> AppResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .user_err(format!("cannot open {}", path.display()))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> AppResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).internal_err(format!("cannot create {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let write = || -> io::Result<()> {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().internal_err(format!("cannot write {}", path.display()))
}

pub fn create_dir(path: &Path) -> AppResult<()> {
    fs::create_dir_all(path).internal_err(format!("cannot create {}", path.display()))
}

pub fn sha256_file(path: &Path) -> AppResult<String> {
    let mut f = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).user_err(format!("cannot read {}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `path` with `suffix` appended to its final component
/// (`out/table.tsv` + `.run.json` -> `out/table.tsv.run.json`).
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let trimmed = path.components().as_path();
    let mut s = trimmed.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// JSON with a trailing newline, the form every JSON artifact is written in.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> AppResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).internal_err("cannot serialize JSON")?;
    out.push(b'\n');
    Ok(out)
}
