//! Optional TOML configuration for oracle caps and the bound constant.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use petrisep_core::benchgen::DEFAULT_LAST_LETTER_CAP;
use petrisep_core::verify::OracleLimits;
use petrisep_core::DEFAULT_EXPONENT_CONSTANT;

/// Environment variable naming a configuration file when `--config` is absent.
pub const CONFIG_ENV: &str = "PETRISEP_CONFIG";

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Longest word the bounded oracles may enumerate.
    pub max_len: usize,
    /// Cap on explored (word, marking) pairs.
    pub node_budget: usize,
    /// Additive constant in the exponent of the theoretical bound.
    pub bound_constant: u32,
    /// Largest `k` accepted by `gen-lastletter`.
    pub last_letter_cap: u32,
}

impl Default for Config {
    fn default() -> Self {
        let limits = OracleLimits::default();
        Config {
            max_len: limits.max_len,
            node_budget: limits.node_budget,
            bound_constant: DEFAULT_EXPONENT_CONSTANT,
            last_letter_cap: DEFAULT_LAST_LETTER_CAP,
        }
    }
}

impl Config {
    pub fn limits(&self) -> OracleLimits {
        OracleLimits { max_len: self.max_len, node_budget: self.node_budget }
    }

    pub fn from_file(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// `explicit`, else the file named by [`CONFIG_ENV`], else the defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Config, String> {
        let path = explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => Config::from_file(&p),
            None => Ok(Config::default()),
        }
    }
}
