use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CsiError;
use crate::SPEED_OF_LIGHT;

/// Acquisition parameters of one measurement run.
///
/// Stored as a TOML key-value file; missing keys take the values of the
/// reference measurement setup ([`MeasurementConfig::default`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementConfig {
    /// Carrier frequency, Hz.
    pub center_frequency: f64,
    /// Sounded bandwidth, Hz.
    pub bandwidth: f64,
    pub num_antennas: usize,
    pub num_freq_bins: usize,
    /// Seconds between CSI snapshots.
    pub csi_interval: f64,
    /// Seconds between GPS fixes.
    pub gps_interval: f64,
    /// Drone ground speed, m/s.
    pub speed: f64,
    pub array_rows: usize,
    pub array_cols: usize,
    /// Element pitch of the rectangular array, m.
    pub element_spacing: f64,
    /// Array phase center, m.
    pub bs_position: [f64; 3],
    /// Array height above ground, m.
    pub bs_height: f64,
}

impl Default for MeasurementConfig {
    /// 2.61 GHz, 18 MHz over 100 bins, 8×8 array at 8 cm pitch mounted 11 m
    /// high, 1 ms CSI / 10 ms GPS logging, 1.5 m/s flight.
    fn default() -> Self {
        MeasurementConfig {
            center_frequency: 2.61e9,
            bandwidth: 18e6,
            num_antennas: 64,
            num_freq_bins: 100,
            csi_interval: 1e-3,
            gps_interval: 10e-3,
            speed: 1.5,
            array_rows: 8,
            array_cols: 8,
            element_spacing: 0.08,
            bs_position: [0.0, 0.0, 11.0],
            bs_height: 11.0,
        }
    }
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<(), CsiError> {
        let err = |m: String| Err(CsiError::Config(m));
        if self.array_rows * self.array_cols != self.num_antennas {
            return err(format!(
                "num_antennas = {} but array is {}x{}",
                self.num_antennas, self.array_rows, self.array_cols
            ));
        }
        if self.num_antennas == 0 {
            return err("num_antennas must be positive".into());
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return err(format!("bandwidth must be > 0, got {}", self.bandwidth));
        }
        if !(self.csi_interval > 0.0 && self.csi_interval.is_finite()) {
            return err(format!("csi_interval must be > 0, got {}", self.csi_interval));
        }
        if self.num_freq_bins < 2 {
            return err(format!("num_freq_bins must be >= 2, got {}", self.num_freq_bins));
        }
        if !(self.center_frequency > 0.0 && self.center_frequency.is_finite()) {
            return err(format!("center_frequency must be > 0, got {}", self.center_frequency));
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return err(format!("element_spacing must be > 0, got {}", self.element_spacing));
        }
        if !(self.gps_interval > 0.0 && self.gps_interval.is_finite()) {
            return err(format!("gps_interval must be > 0, got {}", self.gps_interval));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return err(format!("speed must be >= 0, got {}", self.speed));
        }
        if self.bs_position.iter().any(|v| !v.is_finite()) || !self.bs_height.is_finite() {
            return err("non-finite base station position".into());
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency
    }

    /// Subcarrier spacing `B / F`, Hz.
    pub fn bin_spacing(&self) -> f64 {
        self.bandwidth / self.num_freq_bins as f64
    }

    /// Delay-bin width `1 / B`, s.
    pub fn delay_resolution(&self) -> f64 {
        1.0 / self.bandwidth
    }

    /// Baseband offset of frequency bin `k`; bins span the band centered on 0.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        (k as f64 - (self.num_freq_bins / 2) as f64) * self.bin_spacing()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CsiError> {
        let cfg: MeasurementConfig =
            toml::from_str(text).map_err(|e| CsiError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CsiError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CsiError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}
