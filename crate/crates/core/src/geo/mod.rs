//! Deterministic geometry-based A2G channel synthesis.
//!
//! A scene is a uniform rectangular array, a straight drone flight and a set
//! of point scatterers over a flat ground plane. Each snapshot resolves the
//! line-of-sight path, the ground reflection (image method) and one
//! single-bounce path per scatterer, then sums them into `H(t, m, Δf)`.

mod paths;
mod scene;
mod synth;
mod ura;

pub use paths::{resolve_paths, PathComponent, PathKind};
pub use scene::{NoiseSpec, Scatterer, Scene, SceneFile, Trajectory};
pub use synth::{synth_csi, synth_csi_with, synth_snapshot};
pub use ura::{steering_phase, ElementOrder, UraGeometry};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("invalid array geometry: {0}")]
    Geometry(String),
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("drone position {0:?} is not above the ground plane")]
    BelowGround([f64; 3]),
    #[error("drone position coincides with the array reference point")]
    Coincident,
    #[error("duration {duration} s exceeds the trajectory flight time {available} s")]
    Duration { duration: f64, available: f64 },
    #[error("scene file {path}: {message}")]
    File { path: String, message: String },
    #[error(transparent)]
    Csi(#[from] crate::csi::CsiError),
}

pub(crate) type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}
