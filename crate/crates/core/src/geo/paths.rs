use std::f64::consts::PI;

use super::{norm, sub, GeoError, Scene, Vec3};
use crate::{C64, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    LineOfSight,
    Ground,
    Scatterer(usize),
}

/// One propagation path as seen at the array reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    /// Propagation delay, s.
    pub delay: f64,
    /// Complex amplitude including the carrier phase of the path length.
    pub gain: C64,
    /// Arrival azimuth / elevation at the array, radians.
    pub azimuth: f64,
    pub elevation: f64,
    pub kind: PathKind,
}

/// Free-space amplitude `λ / (4π d)` with carrier phase `e^{−j2πd/λ}`.
fn free_space(d: f64, wavelength: f64) -> C64 {
    C64::from_polar(wavelength / (4.0 * PI * d), -2.0 * PI * d / wavelength)
}

/// Resolves the LOS path, the ground reflection (image method, omitted when
/// the ground coefficient is zero) and one single-bounce path per scatterer.
pub fn resolve_paths(scene: &Scene, uav: Vec3, wavelength: f64) -> Result<Vec<PathComponent>, GeoError> {
    if uav[2] <= scene.ground_height {
        return Err(GeoError::BelowGround(uav));
    }
    let bs = scene.ura.center();
    let arrival = |from: Vec3| scene.ura.azimuth_elevation(sub(from, bs));

    let d_los = norm(sub(uav, bs));
    if d_los < 1e-9 {
        return Err(GeoError::Coincident);
    }
    let mut paths = Vec::with_capacity(2 + scene.scatterers.len());
    let (az, el) = arrival(uav);
    paths.push(PathComponent {
        delay: d_los / SPEED_OF_LIGHT,
        gain: free_space(d_los, wavelength),
        azimuth: az,
        elevation: el,
        kind: PathKind::LineOfSight,
    });

    if scene.ground_reflection != C64::new(0.0, 0.0) {
        let image = [uav[0], uav[1], 2.0 * scene.ground_height - uav[2]];
        let d = norm(sub(image, bs));
        let (az, el) = arrival(image);
        paths.push(PathComponent {
            delay: d / SPEED_OF_LIGHT,
            gain: scene.ground_reflection * free_space(d, wavelength),
            azimuth: az,
            elevation: el,
            kind: PathKind::Ground,
        });
    }

    for (i, s) in scene.scatterers.iter().enumerate() {
        let d1 = norm(sub(uav, s.position));
        let d2 = norm(sub(s.position, bs));
        if d1 < 1e-9 || d2 < 1e-9 {
            continue;
        }
        let amp = s.reflection * s.cross_section.sqrt() * wavelength / ((4.0 * PI).powf(1.5) * d1 * d2);
        let (az, el) = arrival(s.position);
        paths.push(PathComponent {
            delay: (d1 + d2) / SPEED_OF_LIGHT,
            gain: C64::from_polar(amp, -2.0 * PI * (d1 + d2) / wavelength),
            azimuth: az,
            elevation: el,
            kind: PathKind::Scatterer(i),
        });
    }
    Ok(paths)
}
