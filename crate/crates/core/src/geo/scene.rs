use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{add, norm, normalize, scale, sub, ElementOrder, GeoError, UraGeometry, Vec3};
use crate::csi::{CsiError, MeasurementConfig, TrajectoryLog, TrajectorySample};
use crate::C64;

/// Straight constant-speed flight from `start` towards `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: Vec3,
    pub end: Vec3,
    /// m/s
    pub speed: f64,
}

impl Trajectory {
    pub fn length(&self) -> f64 {
        norm(sub(self.end, self.start))
    }

    pub fn direction(&self) -> Vec3 {
        normalize(sub(self.end, self.start)).unwrap_or([1.0, 0.0, 0.0])
    }

    pub fn flight_time(&self) -> f64 {
        self.length() / self.speed
    }

    pub fn position_at(&self, t: f64) -> Vec3 {
        add(self.start, scale(self.direction(), self.speed * t))
    }
}

/// Point scatterer with isotropic re-radiation.
///
/// The single-bounce amplitude is that of a bistatic point target,
/// `reflection · √σ · λ / ((4π)^{3/2} · d₁ · d₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: Vec3,
    /// Reflection magnitude in [0, 1].
    pub reflection: f64,
    /// Effective cross section σ, m².
    #[serde(default = "default_cross_section")]
    pub cross_section: f64,
}

fn default_cross_section() -> f64 {
    100.0
}

/// Complex white Gaussian noise added per `(t, m, Δf)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-snapshot SNR: mean signal power over noise variance, dB.
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub ura: UraGeometry,
    pub trajectory: Trajectory,
    pub scatterers: Vec<Scatterer>,
    pub ground_height: f64,
    pub ground_reflection: C64,
    pub noise: Option<NoiseSpec>,
}

impl Scene {
    pub fn validate(&self) -> Result<(), GeoError> {
        let t = &self.trajectory;
        if !(t.speed > 0.0 && t.speed.is_finite()) {
            return Err(GeoError::Scene(format!("trajectory speed must be > 0, got {}", t.speed)));
        }
        if t.start.iter().chain(t.end.iter()).any(|v| !v.is_finite()) {
            return Err(GeoError::Scene("non-finite trajectory endpoint".into()));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if !(0.0..=1.0).contains(&s.reflection) {
                return Err(GeoError::Scene(format!(
                    "scatterer {i}: reflection {} outside [0, 1]",
                    s.reflection
                )));
            }
            if !(s.cross_section >= 0.0 && s.cross_section.is_finite()) {
                return Err(GeoError::Scene(format!("scatterer {i}: invalid cross section")));
            }
        }
        if self.ground_reflection.norm() > 1.0 || !self.ground_reflection.is_finite() {
            return Err(GeoError::Scene("ground reflection magnitude must be <= 1".into()));
        }
        if self.ura.center()[2] <= self.ground_height {
            return Err(GeoError::Scene("array must be above the ground plane".into()));
        }
        Ok(())
    }

    /// GPS log sampled every `gps_interval` over `[0, duration]`, with a
    /// final fix at `duration` when the grid does not land on it.
    pub fn gps_log(&self, gps_interval: f64, duration: f64) -> Result<TrajectoryLog, CsiError> {
        let n = (duration / gps_interval + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * gps_interval).collect();
        if duration - times[n] > 1e-12 {
            times.push(duration);
        }
        let samples = times
            .into_iter()
            .map(|t| {
                let p = self.trajectory.position_at(t);
                TrajectorySample { timestamp: t, x: p[0], y: p[1], z: p[2] }
            })
            .collect();
        TrajectoryLog::new(samples)
    }
}

/// On-disk scene description (TOML).
///
/// ```toml
/// [measurement]              # MeasurementConfig keys; omitted ones default
/// bs_position = [0.0, 0.0, 11.0]
///
/// [array]
/// normal = [0.0, 1.0, 0.0]
/// element_order = "column-major"
///
/// [trajectory]
/// start = [-15.0, 12.0, 8.0]
/// end = [15.0, 12.0, 8.0]
/// speed = 1.5
///
/// [ground]
/// height = 0.0
/// reflection = [-0.6, 0.0]
///
/// [[scatterers]]
/// position = [5.0, 30.0, 6.0]
/// reflection = 0.7
/// cross_section = 200.0
///
/// [noise]                    # optional
/// snr_db = 30.0
/// seed = 7
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub measurement: MeasurementConfig,
    #[serde(default)]
    pub array: ArraySection,
    pub trajectory: TrajectorySection,
    #[serde(default)]
    pub ground: GroundSection,
    #[serde(default)]
    pub scatterers: Vec<Scatterer>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub normal: Vec3,
    pub element_order: ElementOrder,
}

impl Default for ArraySection {
    fn default() -> Self {
        ArraySection {
            normal: [0.0, 1.0, 0.0],
            element_order: ElementOrder::ColumnMajor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub start: Vec3,
    pub end: Vec3,
    /// Defaults to `measurement.speed`.
    #[serde(default)]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundSection {
    pub height: f64,
    /// Complex coefficient as `[re, im]`.
    pub reflection: [f64; 2],
}

impl Default for GroundSection {
    fn default() -> Self {
        GroundSection { height: 0.0, reflection: [0.0, 0.0] }
    }
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, GeoError> {
        let file_err = |message: String| GeoError::File {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
        Self::parse(&text).map_err(file_err)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scene serializes")
    }

    /// Builds the validated scene and the matching measurement config
    /// (whose `speed` follows the trajectory).
    pub fn build(&self) -> Result<(Scene, MeasurementConfig), GeoError> {
        let mut cfg = self.measurement.clone();
        if let Some(v) = self.trajectory.speed {
            cfg.speed = v;
        }
        cfg.validate()?;
        let ura = UraGeometry::from_config(&cfg, self.array.normal, self.array.element_order)?;
        let scene = Scene {
            ura,
            trajectory: Trajectory {
                start: self.trajectory.start,
                end: self.trajectory.end,
                speed: cfg.speed,
            },
            scatterers: self.scatterers.clone(),
            ground_height: self.ground.height,
            ground_reflection: C64::new(self.ground.reflection[0], self.ground.reflection[1]),
            noise: self.noise,
        };
        scene.validate()?;
        Ok((scene, cfg))
    }
}
