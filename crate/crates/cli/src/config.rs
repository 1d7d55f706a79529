//! Run configuration: a JSON file mirroring the global flags, with flags
//! taking precedence.

use clap::Args;
use dmp_core::refine::ENUMERATION_BOUND;
use dmp_core::{DmpError, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "DMP_CONFIG";

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Rank of GL_n.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Residue field size (prime).
    #[arg(long, global = true)]
    pub q: Option<u32>,
    /// Denominator bound for apartment coordinates and levels.
    #[arg(long, global = true)]
    pub m: Option<i64>,
    /// Truncation depth of the density computations.
    #[arg(long = "K", global = true)]
    #[serde(rename = "K")]
    pub k: Option<i64>,
    /// Seed for sampling and disguised module bases
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Enumeration bound for fork classification.
    #[arg(long, global = true)]
    pub bound: Option<u64>,
    /// JSON input file for solve and synthesize
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write JSON here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Silence the warning for q below the large-p range.
    #[arg(long, global = true)]
    #[serde(default)]
    pub allow_small_p: bool,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub n: usize,
    pub q: u32,
    pub m: Option<i64>,
    pub k: i64,
    pub seed: u64,
    pub bound: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub allow_small_p: bool,
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DmpError::validation("cli", "config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| DmpError::validation("cli", "config", format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Flags in `self` override values from `file`.
    pub fn resolve(&self, file: Option<RunConfig>) -> Settings {
        let file = file.unwrap_or_default();
        Settings {
            n: self.n.or(file.n).unwrap_or(2),
            q: self.q.or(file.q).unwrap_or(5),
            m: self.m.or(file.m),
            k: self.k.or(file.k).unwrap_or(2),
            seed: self.seed.or(file.seed).unwrap_or(0),
            bound: self.bound.or(file.bound).unwrap_or(ENUMERATION_BOUND),
            input: self.input.clone().or(file.input),
            output: self.output.clone().or(file.output),
            allow_small_p: self.allow_small_p || file.allow_small_p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"n": 3, "q": 7, "K": 1}"#).unwrap();
        let flags = RunConfig { q: Some(5), ..Default::default() };
        let s = flags.resolve(Some(file));
        assert_eq!((s.n, s.q, s.k, s.seed), (3, 5, 1, 0));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"depth": 3}"#).is_err());
    }
}
