//! Temporal stationarity: window-averaged antenna correlation matrices, the
//! correlation matrix distance (CMD) between them, CMD maps over travel
//! distance or angle to the base station, and stationary regions.

mod angle;
mod corr;
mod map;
mod region;

pub use angle::angle_to_bs;
pub use corr::{antenna_corr, cmd, AntennaCorrMatrix};
pub use map::{cmd_map, cmd_map_with, CmdMap, CmdMapParams, MapAxis};
pub use region::{stationarity_report, stationary_region, StationarityRow, StationaryRegion};

use thiserror::Error;

/// Default CMD threshold `c_th`.
pub const DEFAULT_CMD_THRESHOLD: f64 = 0.2;
/// Default averaging window, snapshots.
pub const DEFAULT_WINDOW: usize = 20;

#[derive(Debug, Error)]
pub enum TemporalError {
    #[error("window {start}+{window} overruns {snapshots} snapshots")]
    WindowOverrun {
        start: usize,
        window: usize,
        snapshots: usize,
    },
    #[error("frequency band {start}..{end} is empty or outside 0..{bins}")]
    Band { start: usize, end: usize, bins: usize },
    #[error("correlation matrix has zero Frobenius norm")]
    ZeroNorm,
    #[error("matrix dimensions differ: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("angle span {lo}..{hi} deg not covered by trajectory ({min:.3}..{max:.3} deg)")]
    Span { lo: f64, hi: f64, min: f64, max: f64 },
    #[error("degenerate geometry: {0}")]
    Geometry(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
