//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

/// Canonical key: dashes become underscores; `u_c` is accepted for `uc`.
pub fn canonical(key: &str) -> String {
    let k = key.trim().replace('-', "_");
    match k.as_str() {
        "u_c" => "uc".into(),
        _ => k,
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = canonical(k);
            if key.is_empty() {
                return Err(CliError::usage(format!("config line {}: empty key", lineno + 1)));
            }
            let value = v.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::usage(format!("config key {key} given twice")));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Ok((Self::parse(&text)?, text))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// Parse `[1, 2, 3]` or `1, 2, 3` into floats.
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::usage(format!("not a number: {s}"))))
        .collect()
}
