//! Space-time-frequency stationarity analysis for massive-MIMO air-to-ground
//! channels.
//!
//! The crate is organized along the processing chain:
//!
//! * [`csi`] holds the CSI tensor, measurement configuration, trajectory logs
//!   and the 16-bit fixed-point capture format.
//! * [`geo`] synthesizes ground-truth CSI for a uniform rectangular array and
//!   a drone flying a straight line past it.
//! * [`sounder`] simulates the uplink sounding chain: Zadoff-Chu pilots,
//!   cross-correlation frame sync and least-squares estimation.
//! * [`pdp`], [`temporal`], [`frequency`] and [`spatial`] implement the
//!   stationarity analyses in the delay, time, frequency and array domains.
//!
//! Heavy loops run on rayon when the `parallel` feature is enabled (the
//! default). Every entry point that fans out also has a `*_with` variant
//! taking an explicit [`Execution`] so the sequential path stays reachable.

pub mod csi;
pub mod exec;
pub mod frequency;
pub mod geo;
pub mod pdp;
pub mod sounder;
pub mod spatial;
pub mod stats;
pub mod temporal;

mod csv_out;

pub use exec::Execution;

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
