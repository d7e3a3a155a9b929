//! Flat `key = value` config files, overridable by CLI flags.
//!
//! Recognized keys: `rus`, `antennas_per_ru`, `num_users`, `snr_db`,
//! `trials`, `seed`. Blank lines and `#` comments are ignored.

use std::fs;
use std::path::Path;

use mimo_core::SystemConfig;

use crate::{HarnessError, Result};

/// Partial config: only the keys present in the file.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    pub rus: Option<usize>,
    pub antennas_per_ru: Option<usize>,
    pub num_users: Option<usize>,
    pub snr_db: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Validation(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                HarnessError::Validation(format!("line {}: invalid {what}: `{value}`", lineno + 1))
            };
            match key {
                "rus" => out.rus = Some(value.parse().map_err(|_| bad("integer"))?),
                "antennas_per_ru" => {
                    out.antennas_per_ru = Some(value.parse().map_err(|_| bad("integer"))?)
                }
                "num_users" => out.num_users = Some(value.parse().map_err(|_| bad("integer"))?),
                "snr_db" => out.snr_db = Some(value.parse().map_err(|_| bad("number"))?),
                "trials" => out.trials = Some(value.parse().map_err(|_| bad("integer"))?),
                "seed" => out.seed = Some(value.parse().map_err(|_| bad("integer"))?),
                other => {
                    return Err(HarnessError::Validation(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Fills in a base config; file values apply only where the flag was not
    /// given (callers pass `None` for file-covered fields they want kept).
    pub fn apply(&self, mut cfg: SystemConfig) -> SystemConfig {
        if let Some(v) = self.rus {
            cfg.num_rus = v;
        }
        if let Some(v) = self.antennas_per_ru {
            cfg.antennas_per_ru = v;
        }
        if let Some(v) = self.num_users {
            cfg.num_users = v;
        }
        if let Some(v) = self.snr_db {
            cfg.snr_db = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg
    }
}
