//! Settings merged from built-in defaults, an optional TOML file, the
//! environment and command-line flags, in increasing priority.

use std::path::{Path, PathBuf};

use gridcolor::cache::CACHE_ENV;
use gridcolor::search::SearchBudget;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileBudget {
    pub nodes: Option<u64>,
    pub wall_ms: Option<u64>,
    pub threads: Option<usize>,
}

/// Layout of the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub budget: FileBudget,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
    pub deterministic: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Flags that override the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub nodes: Option<u64>,
    pub wall_ms: Option<u64>,
    pub threads: Option<usize>,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
    pub deterministic: bool,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub budget: SearchBudget,
    pub cache_path: Option<PathBuf>,
    pub format: Format,
    pub deterministic: bool,
}

impl Config {
    pub fn resolve(file: FileConfig, env_cache: Option<PathBuf>, flags: Overrides) -> Result<Self, String> {
        let defaults = SearchBudget::default();
        let deterministic = flags.deterministic || file.deterministic.unwrap_or(false);
        let nodes = flags.nodes.or(file.budget.nodes).unwrap_or(defaults.max_nodes);
        let mut wall_ms = flags.wall_ms.or(file.budget.wall_ms).unwrap_or(defaults.wall_ms);
        let mut threads = flags.threads.or(file.budget.threads).unwrap_or(defaults.threads);
        if deterministic {
            // Node limits are reproducible; wall clocks and thread races are not.
            threads = 1;
            wall_ms = u64::MAX / 2;
        }
        let budget = SearchBudget::new(nodes, wall_ms, threads).map_err(|e| e.to_string())?;
        Ok(Config {
            budget,
            cache_path: flags.cache.or(env_cache).or(file.cache),
            format: flags.format.or(file.format).unwrap_or(Format::Text),
            deterministic,
        })
    }

    pub fn env_cache() -> Option<PathBuf> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
    }
}
