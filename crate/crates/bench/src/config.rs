//! Sweep configuration, read from TOML.

use std::path::{Path, PathBuf};

use mmf_core::Accounting;
use serde::{Deserialize, Serialize};

use crate::method::Method;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_trials() -> usize {
    3
}

fn default_fractions() -> Vec<f64> {
    vec![0.01, 0.10, 0.25, 0.50, 0.75]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Line-oriented `group/name [path]` list. Relative paths resolve against
    /// the config file's directory.
    pub manifest: PathBuf,
    pub methods: Vec<Method>,
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output directory for `runs.csv`, `report.json` and `wins.md`.
    pub output: PathBuf,
    #[serde(default)]
    pub accounting: Accounting,
    /// Matrices are looked up here as `<group>/<name>.mtx` before downloading.
    #[serde(default)]
    pub data_dir: Option<PathBuf>,
    /// Download cache; no downloads are attempted when unset.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    /// CUR rank of the hybrid method; `n / 4` when unset.
    #[serde(default)]
    pub hybrid_rank: Option<usize>,
    /// Baseline the win-rate tables compare against.
    #[serde(default = "Method::baseline")]
    pub baseline: Method,
    #[serde(default)]
    pub max_numerical_symmetry: Option<f64>,
    #[serde(default)]
    pub max_n: Option<usize>,
    /// Record wall-clock times; reports are then no longer byte-reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.manifest);
        resolve(&mut config.output);
        config.data_dir.as_mut().map(resolve);
        config.cache_dir.as_mut().map(resolve);
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: &str| Err(ConfigError::Invalid(msg.to_owned()));
        if self.methods.is_empty() {
            return invalid("methods must not be empty");
        }
        if self.fractions.is_empty() {
            return invalid("fractions must not be empty");
        }
        if self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return invalid("fractions must lie in (0, 1]");
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.hybrid_rank == Some(0) {
            return invalid("hybrid_rank must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
manifest = "m.txt"
methods = ["direct-greedytopn", "cur"]
output = "out"
"#;

    #[test]
    fn defaults_fill_in() {
        let c = SweepConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.fractions, vec![0.01, 0.10, 0.25, 0.50, 0.75]);
        assert_eq!(c.accounting, Accounting::SparseCoo);
        assert_eq!(c.baseline, Method::Cur);
        assert!(!c.timing);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            "manifest = \"m\"\nmethods = []\noutput = \"o\"",
            "manifest = \"m\"\nmethods = [\"cur\"]\noutput = \"o\"\nfractions = [0.0]",
            "manifest = \"m\"\nmethods = [\"cur\"]\noutput = \"o\"\nfractions = [1.5]",
            "manifest = \"m\"\nmethods = [\"cur\"]\noutput = \"o\"\ntrials = 0",
            "manifest = \"m\"\nmethods = [\"svd\"]\noutput = \"o\"",
            "manifest = \"m\"\nmethods = [\"cur\"]\noutput = \"o\"\ncolour = 1",
        ];
        for text in bad {
            assert!(SweepConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn accounting_spelling() {
        let c = SweepConfig::from_toml(&format!("{MINIMAL}accounting = \"dense\"")).unwrap();
        assert_eq!(c.accounting, Accounting::Dense);
    }
}
