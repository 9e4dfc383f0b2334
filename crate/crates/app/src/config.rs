//! Service configuration.
//!
//! Values come from, in increasing priority: built-in defaults, a TOML file,
//! the `LIFELINES_PORT` / `LIFELINES_DATA` environment variables, and
//! command line flags.

use std::path::{Path, PathBuf};

use lifelines_core::{Palette, Rgb};
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_DATA: &str = "gallery.jsonl";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid {name}: {reason}")]
    Value { name: &'static str, reason: String },
}

/// Contents of a config file. Every field is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub port: Option<u16>,
    pub data: Option<PathBuf>,
    /// Palette colors as `#rrggbb` strings.
    pub palette: Option<Vec<String>>,
    pub palette_offset: Option<i64>,
    /// Allowed CORS origins; `"*"` allows any origin.
    pub cors_origins: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub port: u16,
    pub data: PathBuf,
    pub palette: Palette,
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: DEFAULT_PORT,
            data: PathBuf::from(DEFAULT_DATA),
            palette: Palette::default(),
            cors_origins: vec!["*".to_string()],
        }
    }
}

/// Values set explicitly on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub port: Option<u16>,
    pub data: Option<PathBuf>,
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

impl ServiceConfig {
    /// Merges the config file (if any), the environment and the flags.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, ConfigError> {
        let file = match file {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let env_port = env_var("LIFELINES_PORT")
            .map(|v| {
                v.parse::<u16>().map_err(|e| ConfigError::Value {
                    name: "LIFELINES_PORT",
                    reason: e.to_string(),
                })
            })
            .transpose()?;
        let env_data = env_var("LIFELINES_DATA").map(PathBuf::from);
        Self::merge(file, env_port, env_data, flags)
    }

    fn merge(
        file: FileConfig,
        env_port: Option<u16>,
        env_data: Option<PathBuf>,
        flags: &Overrides,
    ) -> Result<Self, ConfigError> {
        let defaults = ServiceConfig::default();
        let port = flags.port.or(env_port).or(file.port).unwrap_or(defaults.port);
        if port == 0 {
            return Err(ConfigError::Value {
                name: "port",
                reason: "must be in 1..=65535".into(),
            });
        }
        let palette = match file.palette {
            Some(colors) => {
                let colors = colors
                    .iter()
                    .map(|c| Rgb::parse_hex(c))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ConfigError::Value {
                        name: "palette",
                        reason: e.to_string(),
                    })?;
                Palette::new(colors, 0).map_err(|e| ConfigError::Value {
                    name: "palette",
                    reason: e.to_string(),
                })?
            }
            None => defaults.palette,
        };
        Ok(ServiceConfig {
            port,
            data: flags.data.clone().or(env_data).or(file.data).unwrap_or(defaults.data),
            palette: palette.with_offset(file.palette_offset.unwrap_or(0)),
            cors_origins: file.cors_origins.unwrap_or(defaults.cors_origins),
        })
    }
}
