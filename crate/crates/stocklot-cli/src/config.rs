//! Flat key-value run configuration.
//!
//! The file format is `key = value` lines with `#` comments. Item-scoped
//! keys use a dotted prefix whose remainder is the item id (which may
//! contain spaces): `price.item beta = 12.5`. All tool defaults — band
//! cuts, service level, the 365-day rate divisor, display rounding —
//! live here rather than in the math modules.

use crate::CliError;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::input(format!(
                    "config line {}: expected `key = value`, got {line:?}",
                    idx + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Item-scoped lookup with global fallback: `key.item`, then `key`.
    pub fn item_raw(&self, key: &str, item: &str) -> Option<&str> {
        self.raw(&format!("{key}.{item}")).or_else(|| self.raw(key))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn item_f64(&self, key: &str, item: &str) -> Result<Option<f64>, CliError> {
        self.item_raw(key, item)
            .map(|v| parse_f64(key, v))
            .transpose()
    }

    pub fn u32(&self, key: &str) -> Result<Option<u32>, CliError> {
        self.raw(key)
            .map(|v| {
                v.parse::<u32>().map_err(|_| {
                    CliError::input(format!("config key {key}: expected an integer, got {v:?}"))
                })
            })
            .transpose()
    }

    pub fn item_u32(&self, key: &str, item: &str) -> Result<Option<u32>, CliError> {
        self.item_raw(key, item)
            .map(|v| {
                v.parse::<u32>().map_err(|_| {
                    CliError::input(format!("config key {key}: expected an integer, got {v:?}"))
                })
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, CliError> {
        Ok(self.u32(key)?.unwrap_or(default))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value.parse::<f64>().map_err(|_| {
        CliError::input(format!(
            "config key {key}: expected a number, got {value:?}"
        ))
    })
}
