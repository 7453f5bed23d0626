//! CSI data model: measurement configuration, the `T × M × F` CSI tensor,
//! GPS trajectory logs and the binary capture format.

mod config;
mod fixed;
mod format;
mod tensor;
mod trajectory;

pub use config::MeasurementConfig;
pub use fixed::{FixedPointSample, Scale};
pub use format::{load_csi, store_csi, store_csi_with_scale, FORMAT_VERSION, HEADER_LEN, MAGIC};
pub use tensor::CsiTensor;
pub use trajectory::{align_trajectory, TrajectoryLog, TrajectorySample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsiError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid tensor: {0}")]
    Tensor(String),
    #[error("sample {index:?} ({component}) = {value} is outside the 16-bit range at scale 2^{exponent}")]
    OutOfRange {
        index: (usize, usize, usize),
        component: &'static str,
        value: f64,
        exponent: i16,
    },
    #[error("bad magic bytes, not a CSI capture file")]
    BadMagic,
    #[error("unsupported format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u16, supported: u16 },
    #[error("truncated stream: {missing} bytes missing ({expected} expected, {available} available)")]
    Truncated {
        missing: usize,
        expected: usize,
        available: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty trajectory log")]
    EmptyLog,
    #[error("trajectory: {0}")]
    Trajectory(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
