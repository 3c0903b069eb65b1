//! Verification campaigns over `sobtrace-core`, their configuration and
//! their reports. The `sobtrace` binary is a thin wrapper around [`execute`].

pub mod campaigns;
pub mod config;
pub mod report;

use std::time::Instant;

pub use config::{Campaign, Overrides, RunConfig};
pub use report::{Check, Report};

/// Configuration problems. All of them map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown configuration key '{0}'")]
    UnknownKey(String),
    #[error("config line {line}: expected `key = value`, got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("--{key}: expected {expected}, got '{got}'")]
    Value { key: String, expected: String, got: String },
    #[error("--{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Runs the configured campaign. `elapsed_ms` is only filled in when
/// `timing` is set, so reports stay byte-identical across reruns.
pub fn execute(config: RunConfig, timing: bool) -> Report {
    let start = Instant::now();
    let checks = campaigns::run(&config);
    let elapsed = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    Report::new(config, checks, elapsed)
}
