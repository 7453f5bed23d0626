//! Uplink sounding chain: Zadoff-Chu pilots, cross-correlation frame
//! synchronization and per-subcarrier least-squares channel estimation.

mod chain;
mod ls;
mod sync;
mod zc;

pub use chain::{estimate_csi, estimate_csi_with, nmse, pilot_symbols, EstimateOutcome, SoundingConfig};
pub use ls::ls_estimate;
pub use sync::{pss_detect, SyncResult, DEFAULT_SYNC_THRESHOLD};
pub use zc::{zadoff_chu, PilotSequence};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SounderError {
    #[error("root {root} must be in 1..{length} and coprime with it")]
    Root { root: u32, length: u32 },
    #[error("received sequence ({received} samples) shorter than reference ({reference})")]
    TooShort { received: usize, reference: usize },
    #[error("no synchronization: peak metric {peak_metric:.3} below threshold {threshold:.3}")]
    NoSync { peak_metric: f64, threshold: f64 },
    #[error("transmitted pilot is zero at bin {0}")]
    ZeroPilot(usize),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error(transparent)]
    Csi(#[from] crate::csi::CsiError),
}
