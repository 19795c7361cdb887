use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wasep::harness::{self, HarnessError, Settings};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected key=value, got '{token}'")]
    Syntax { path: PathBuf, line: usize, token: String },
    #[error("key '{0}' given twice in the config file")]
    Duplicate(String),
    #[error("no experiment given (use --exp or exp=...)")]
    MissingExperiment,
    #[error("no seed given (use --seed or seed=...); runs never draw implicit entropy")]
    MissingSeed,
    #[error("no output directory given (use --out or out=...)")]
    MissingOut,
    #[error("bad value '{value}' for '{key}': expected a non-negative integer")]
    NotInteger { key: String, value: String },
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// Flat key=value text. Tokens are separated by whitespace, `#` starts a comment.
pub fn parse_pairs(text: &str, path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let Some((k, v)) = token.split_once('=').filter(|(k, _)| !k.is_empty()) else {
                return Err(ConfigError::Syntax {
                    path: path.to_path_buf(),
                    line: i + 1,
                    token: token.to_string(),
                });
            };
            if out.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
        }
    }
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pairs(&text, path)
}

/// Everything a run needs, validated.
#[derive(Debug)]
pub struct RunConfig {
    pub settings: Settings,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

fn take_u64(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<u64>, ConfigError> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| ConfigError::NotInteger {
            key: key.to_string(),
            value: v,
        }),
    }
}

/// Merges file values with flag values (flags win) and validates the result.
/// The reserved keys exp, seed, out and threads are peeled off; the rest must
/// be keys of the chosen experiment.
pub fn resolve(mut file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    file.extend(flags);
    let exp = file.remove("exp").ok_or(ConfigError::MissingExperiment)?;
    let seed = take_u64(&mut file, "seed")?.ok_or(ConfigError::MissingSeed)?;
    let threads = take_u64(&mut file, "threads")?.map(|t| t as usize);
    let out = file.remove("out").map(PathBuf::from).ok_or(ConfigError::MissingOut)?;
    let settings = harness::resolve(&exp, seed, &file)?;
    Ok(RunConfig { settings, out, threads })
}
