//! Flat key=value run configuration files.
//!
//! One `key=value` pair per line; blank lines and `#` comments are ignored.
//! Command-line flags always win over file values.

use std::collections::HashMap;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    MissingEquals { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("key {key:?}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
}

#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    /// Parses the file content, rejecting keys outside `allowed`.
    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self, ConfigError> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MissingEquals { line: i + 1 })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey { line: i + 1, key });
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey { line: i + 1, key });
            }
        }
        Ok(Self { values })
    }

    /// Flag value if set, else the config value, else the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: raw.clone(),
            }),
            None => Ok(default),
        }
    }

    /// Like [`Self::resolve`] but with no default; `None` when absent.
    pub fn resolve_opt<T: FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, ConfigError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw.parse().map(Some).map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: raw.clone(),
            }),
            None => Ok(None),
        }
    }
}
