//! `--config file.toml` support.
//!
//! Each subcommand reads the table named after it, e.g.
//!
//! ```toml
//! [build-wikispell]
//! seed = 7
//! eval-per-bucket = 1000
//! ```
//!
//! Keys are long flag names (`_` and `-` are interchangeable). Values are
//! turned into flags placed before the user's own, and a key whose flag also
//! appears on the command line is dropped, so flags always win.

use std::ffi::OsString;
use std::path::PathBuf;

use crate::error::{AppError, AppResult};
use crate::fsio;

/// Global flags that take a value and may appear before the subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 3] = ["--config", "--workers", "--run-meta"];

fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--" {
            return None;
        }
        if GLOBAL_VALUE_FLAGS.contains(&a.as_ref()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn mentions(args: &[OsString], flag: &str) -> bool {
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.strip_prefix(flag).is_some_and(|rest| rest.starts_with('='))
    })
}

fn scalar(flag: &str, v: &toml::Value) -> AppResult<Option<String>> {
    Ok(match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(f.to_string()),
        toml::Value::Boolean(_) => None,
        toml::Value::Datetime(d) => Some(d.to_string()),
        _ => return Err(AppError::user(format!("config value for {flag} must be a scalar or a list of scalars"))),
    })
}

/// Arguments with the config section spliced in after the subcommand name.
/// Returns the argument list unchanged when no `--config` is given.
pub fn expand_args(args: Vec<OsString>) -> AppResult<(Vec<OsString>, Option<PathBuf>)> {
    let Some(path) = config_path(&args) else {
        return Ok((args, None));
    };
    let Some(sub) = subcommand_index(&args) else {
        return Ok((args, Some(path)));
    };
    let text = fsio::read_string(&path)?;
    let doc: toml::Table = text
        .parse()
        .map_err(|e| AppError::user(format!("config {}: {e}", path.display())))?;
    let name = args[sub].to_string_lossy().to_string();
    let section = match doc.get(&name) {
        None => return Ok((args, Some(path))),
        Some(toml::Value::Table(t)) => t,
        Some(_) => return Err(AppError::user(format!("config {}: [{name}] must be a table", path.display()))),
    };
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in section {
        let flag = format!("--{}", key.replace('_', "-"));
        if mentions(&args[sub + 1..], &flag) {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => injected.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    let v = scalar(&flag, item)?
                        .ok_or_else(|| AppError::user(format!("config list for {flag} cannot hold booleans")))?;
                    injected.push(flag.clone().into());
                    injected.push(v.into());
                }
            }
            other => {
                if let Some(v) = scalar(&flag, other)? {
                    injected.push(flag.into());
                    injected.push(v.into());
                }
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub + 1..]);
    Ok((out, Some(path)))
}
