use std::path::PathBuf;

use qcwb_core::simulator::{DEFAULT_TRIALS, MAX_SIM_QUBITS};

pub const ENV_PORT: &str = "QCWB_PORT";
pub const ENV_CATALOG_DIR: &str = "QCWB_CATALOG_DIR";
pub const ENV_SEED: &str = "QCWB_SEED";
pub const ENV_STATIC_DIR: &str = "QCWB_STATIC_DIR";

/// Upper bounds applied to every request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub max_qubits_sim: usize,
    pub max_shots: u64,
    pub max_trials: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_qubits_sim: MAX_SIM_QUBITS,
            max_shots: 10_000_000,
            max_trials: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub port: u16,
    pub catalog_dir: PathBuf,
    /// Seed used when a request does not carry one.
    pub seed: u64,
    pub default_shots: u64,
    pub default_trials: usize,
    /// Built web assets served at `/` when set.
    pub static_dir: Option<PathBuf>,
    pub limits: Limits,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            catalog_dir: PathBuf::from("machines"),
            seed: 0,
            default_shots: 1024,
            default_trials: DEFAULT_TRIALS,
            static_dir: None,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid value '{value}' for {key}: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub value: String,
    pub reason: String,
}

fn parsed<T: std::str::FromStr>(key: &str, raw: Option<String>) -> Result<Option<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.map(|value| {
        value.trim().parse().map_err(|e: T::Err| ConfigError {
            key: key.to_string(),
            reason: e.to_string(),
            value,
        })
    })
    .transpose()
}

impl ServiceConfig {
    /// Defaults overridden by `QCWB_*` variables looked up through `var`.
    pub fn from_lookup(var: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(port) = parsed(ENV_PORT, var(ENV_PORT))? {
            cfg.port = port;
        }
        if let Some(seed) = parsed(ENV_SEED, var(ENV_SEED))? {
            cfg.seed = seed;
        }
        if let Some(dir) = var(ENV_CATALOG_DIR).filter(|d| !d.is_empty()) {
            cfg.catalog_dir = PathBuf::from(dir);
        }
        cfg.static_dir = var(ENV_STATIC_DIR).filter(|d| !d.is_empty()).map(PathBuf::from);
        Ok(cfg)
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }
}
