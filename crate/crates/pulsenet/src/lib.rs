//! File formats, run configuration and the `pulsenet` command line on top of
//! [`pulsenet_core`].

pub mod cli;
pub mod config;
pub mod netlist;
pub mod plot;
pub mod quantity;
pub mod schema;
pub mod wavecsv;

use std::path::{Path, PathBuf};

pub use pulsenet_core as core;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: config::ConfigError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: wavecsv::CsvError },
    #[error("{}: {source}", path.display())]
    Netlist { path: PathBuf, source: netlist::NetlistError },
    #[error(transparent)]
    Domain(#[from] pulsenet_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Usage errors (bad arguments or config schema) exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
