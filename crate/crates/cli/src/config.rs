//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use heatasym::initial_data::document::ProfileDocument;
use heatasym::initial_data::InitialProfile1D;
use heatasym::specfun::SignMode;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Oracle values on an `x × t` grid.
    Oracle,
    /// Partial sum against the oracle on an `x × t` grid.
    Eval,
    /// `H_{n,0}(η)`, `H_{n,1}(η)` for `n ≤ n_max`.
    Expand,
    /// Decay rates of the partial sums on an `η × t` grid.
    Converge,
    /// Least-squares recovery of the coefficients from the oracle.
    Extract,
    /// Finite-difference residuals of the coefficient recurrences.
    Recurrence,
    /// Oracle self-checks.
    Integrity,
    /// Two-dimensional leading term against the oracle.
    Plane,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    /// A JSON document with the configuration echoed next to the results.
    Doc,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x2: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: Command,
    /// Inline profile document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDocument>,
    /// Profile document in a separate TOML file, relative to the config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_path: Option<PathBuf>,
    /// Name of a two-dimensional builtin, for `plane`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile2d: Option<String>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Oracle tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Tolerance on the tail moments that enter `H_{n,0}`.
    #[serde(default = "default_moment_tol")]
    pub moment_tol: f64,
    /// Finite-difference step for `recurrence`.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub mode: SignMode,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_n_max() -> usize {
    2
}

fn default_tol() -> f64 {
    1e-12
}

fn default_moment_tol() -> f64 {
    1e-8
}

fn default_fd_step() -> f64 {
    1e-3
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    /// Reads `path`, resolving `profile_path` into an inline profile.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if let Some(rel) = cfg.profile_path.take() {
            if cfg.profile.is_some() {
                return Err(ConfigError::Invalid("give either `profile` or `profile_path`, not both".into()));
            }
            let full = path.parent().unwrap_or(Path::new(".")).join(rel);
            let text = read(&full)?;
            cfg.profile =
                Some(toml::from_str(&text).map_err(|source| ConfigError::Parse { path: full.clone(), source })?);
        }
        Ok(cfg)
    }

    pub fn profile(&self) -> heatasym::Result<InitialProfile1D> {
        match &self.profile {
            Some(doc) => doc.to_profile(),
            None => Err(heatasym::Error::Profile("this command needs a `profile`".into())),
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })
}
