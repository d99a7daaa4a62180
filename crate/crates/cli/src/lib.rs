//! Front-end for the dqcluster simulator: scenario files, bundled presets,
//! batch export and the verification suite.

pub mod config;
pub mod export;
pub mod presets;
pub mod verify;

pub use config::{config_hash, parse_scenario, serialize_scenario};
pub use export::{run_and_export, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("missing required fields: {}", .0.join(", "))]
    MissingFields(Vec<String>),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Invalid(#[from] dqcluster::Error),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("non-finite value in channel '{channel}' at t = {time}")]
    NonFinite { channel: String, time: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
