//! Standard-library companion of `kenergy-core`: run configurations,
//! verification suites, reports and binary/CSV field formats. The `kenergy`
//! binary is a thin command-line layer over this crate.

pub mod config;
pub mod io;
pub mod report;
pub mod suites;

pub use config::{BackendKind, RunConfig};
pub use report::{Check, Format, Report};
pub use suites::{run_suite, Suite};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },
    #[error(transparent)]
    Core(#[from] kenergy_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed file: {0}")]
    Format(String),
}

impl LabError {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config { location: location.into(), message: message.into() }
    }
}
