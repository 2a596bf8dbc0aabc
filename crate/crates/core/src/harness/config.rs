//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Parsed key/value pairs. Later [`Config::set`] calls override file values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines. `#` starts a comment; blank lines are
    /// skipped; a key may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::parse(idx + 1, format!("invalid key '{key}'")));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::parse(idx + 1, format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{pair}' is not key=value")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::Config(format!(
                "unknown key '{k}' (allowed: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// Canonical text: sorted `key=value` lines.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of [`Config::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn parse_value<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("invalid value '{v}' for '{key}'")))
            })
            .transpose()
    }

    pub fn value_or<V: std::str::FromStr>(&self, key: &str, default: V) -> Result<V> {
        Ok(self.parse_value(key)?.unwrap_or(default))
    }

    pub fn require<V: std::str::FromStr>(&self, key: &str) -> Result<V> {
        self.parse_value(key)?
            .ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    /// A list of numbers: comma separated values and/or `start:step:stop`
    /// ranges (inclusive, points rounded to 1e-12).
    pub fn grid(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_grid(v, key)).transpose()
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }
}

/// Parses `a,b,c` and `start:step:stop` items into one list.
pub fn parse_grid(text: &str, key: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("invalid grid '{text}' for '{key}'"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(single.parse::<f64>().map_err(|_| bad())?),
            [a, s, b] => {
                let (a, s, b): (f64, f64, f64) = (
                    a.parse().map_err(|_| bad())?,
                    s.parse().map_err(|_| bad())?,
                    b.parse().map_err(|_| bad())?,
                );
                if !(s > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                    return Err(bad());
                }
                let count = ((b - a) / s + 1e-9).floor() as usize;
                if count > 1_000_000 {
                    return Err(bad());
                }
                out.extend((0..=count).map(|i| ((a + i as f64 * s) * 1e12).round() / 1e12));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(out)
}
