//! Command-line front end: scene synthesis, simulated sounding, analysis
//! bundles and batch reports. Every run records a [`manifest::RunManifest`]
//! next to its outputs; replaying it reproduces them byte for byte.

pub mod analyze;
pub mod args;
pub mod error;
pub mod manifest;
pub mod output;
pub mod run;

pub use error::CliError;
pub use run::execute;
