//! `key = value` experiment files. Keys are long flag names without the
//! leading dashes; `#` starts a comment.

use std::ffi::OsString;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("config line {line}: {key} expects true or false")]
    NotBool { line: usize, key: String },
}

/// Flags that take no value.
const SWITCHES: &[&str] = &["with-sim", "accept-all-above"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    line: usize,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.push(Entry {
            key,
            value: value.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<Entry>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Command-line tokens equivalent to the entries, in `--key=value` form.
pub fn to_args(entries: &[Entry]) -> Result<Vec<OsString>, ConfigError> {
    let mut out = Vec::new();
    for e in entries {
        if SWITCHES.contains(&e.key.as_str()) {
            match e.value.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => out.push(format!("--{}", e.key).into()),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(ConfigError::NotBool {
                        line: e.line,
                        key: e.key.clone(),
                    })
                }
            }
        } else {
            out.push(format!("--{}={}", e.key, e.value).into());
        }
    }
    Ok(out)
}
