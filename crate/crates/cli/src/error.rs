use std::path::Path;

use a2g_mimo::csi::CsiError;
use a2g_mimo::frequency::FrequencyError;
use a2g_mimo::geo::GeoError;
use a2g_mimo::pdp::PdpError;
use a2g_mimo::sounder::SounderError;
use a2g_mimo::spatial::SpatialError;
use a2g_mimo::temporal::TemporalError;
use thiserror::Error;

/// Failure of a CLI run, tagged with the module that raised it.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{module}: {message}")]
    Config { module: &'static str, message: String },
    #[error("{module}: {message}")]
    Data { module: &'static str, message: String },
    #[error("{module}: {message}")]
    Numeric { module: &'static str, message: String },
}

impl CliError {
    pub fn config(module: &'static str, message: impl ToString) -> Self {
        CliError::Config { module, message: message.to_string() }
    }

    pub fn data(module: &'static str, message: impl ToString) -> Self {
        CliError::Data { module, message: message.to_string() }
    }

    pub fn numeric(module: &'static str, message: impl ToString) -> Self {
        CliError::Numeric { module, message: message.to_string() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::data("io", format!("{}: {err}", path.display()))
    }

    /// Process exit code. Usage errors exit with 2 from the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Data { .. } => 4,
            CliError::Numeric { .. } => 5,
        }
    }
}

impl From<CsiError> for CliError {
    fn from(e: CsiError) -> Self {
        const M: &str = "csi-model";
        match e {
            CsiError::Config(_) => CliError::config(M, e),
            CsiError::OutOfRange { .. } => CliError::numeric(M, e),
            _ => CliError::data(M, e),
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::Csi(inner) => inner.into(),
            e => CliError::config("geo-channel", e),
        }
    }
}

impl From<SounderError> for CliError {
    fn from(e: SounderError) -> Self {
        const M: &str = "sounder-sim";
        match e {
            SounderError::Csi(inner) => inner.into(),
            SounderError::NoSync { .. } | SounderError::ZeroPilot(_) => CliError::numeric(M, e),
            e => CliError::config(M, e),
        }
    }
}

impl From<PdpError> for CliError {
    fn from(e: PdpError) -> Self {
        const M: &str = "pdp";
        match e {
            PdpError::Window { .. } => CliError::config(M, e),
            PdpError::ZeroProfile(_) => CliError::numeric(M, e),
            e => CliError::data(M, e),
        }
    }
}

impl From<TemporalError> for CliError {
    fn from(e: TemporalError) -> Self {
        const M: &str = "temporal";
        match e {
            TemporalError::ZeroNorm => CliError::numeric(M, e),
            TemporalError::Dimension(..) | TemporalError::Io(_) | TemporalError::Csv(_) => CliError::data(M, e),
            e => CliError::config(M, e),
        }
    }
}

impl From<FrequencyError> for CliError {
    fn from(e: FrequencyError) -> Self {
        const M: &str = "frequency";
        match e {
            FrequencyError::ZeroProfile(_) | FrequencyError::ZeroMean { .. } => CliError::numeric(M, e),
            FrequencyError::Io(_) | FrequencyError::Csv(_) => CliError::data(M, e),
            e => CliError::config(M, e),
        }
    }
}

impl From<SpatialError> for CliError {
    fn from(e: SpatialError) -> Self {
        const M: &str = "spatial";
        match e {
            SpatialError::DeadElement(_) => CliError::numeric(M, e),
            SpatialError::Io(_) | SpatialError::Csv(_) => CliError::data(M, e),
            e => CliError::config(M, e),
        }
    }
}
