//! Flat key-value run configuration (sections per command, `key = value`
//! lines, `#` comments) and the reproducibility header embedded at the top
//! of every output file.
//!
//! Command-line flags override file values; the header records the fully
//! resolved configuration so a run can be reproduced bit-exactly from its
//! own output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Parsed config file: section name → key → value. Keys outside any
/// section land in the `""` section and act as global defaults.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    sections
                        .entry(current.clone())
                        .or_default()
                        .insert(k.trim().to_string(), v.trim().to_string());
                }
                None => {
                    return Err(Error::Config(format!(
                        "line {}: expected `key = value` or `[section]`, got `{line}`",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(ConfigFile { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Look a key up in the command's section, falling back to the global
    /// section.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.sections.get("").and_then(|s| s.get(key)))
            .map(String::as_str)
    }

    /// Parse a looked-up value, reporting the offending key on failure.
    pub fn get_parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }
}

/// Tool version, master seed, and the resolved configuration; embedded at
/// the start of every output file. The worker count is deliberately not
/// part of it: results are bit-identical for any worker count.
#[derive(Debug, Clone, Serialize)]
pub struct OutputHeader {
    pub version: String,
    pub master_seed: u64,
    pub config: BTreeMap<String, String>,
}

impl OutputHeader {
    pub fn new(master_seed: u64, config: BTreeMap<String, String>) -> Self {
        OutputHeader {
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            config,
        }
    }

    /// `#`-prefixed comment lines placed before the CSV header row.
    pub fn csv_comments(&self) -> String {
        let mut out = format!(
            "# infodrift {}\n# master_seed={}\n",
            self.version, self.master_seed
        );
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }
}
