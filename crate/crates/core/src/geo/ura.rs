use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{add, cross, dot, normalize, scale, GeoError, Vec3};
use crate::csi::MeasurementConfig;
use crate::C64;

/// Mapping between the flat antenna index and the physical `(row, col)` slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementOrder {
    /// `index = col · rows + row`; index offsets of `rows` are horizontal
    /// neighbors.
    #[default]
    ColumnMajor,
    /// `index = row · cols + col`.
    RowMajor,
}

impl ElementOrder {
    pub fn index(self, row: usize, col: usize, rows: usize, cols: usize) -> usize {
        match self {
            ElementOrder::ColumnMajor => col * rows + row,
            ElementOrder::RowMajor => row * cols + col,
        }
    }

    pub fn slot(self, index: usize, rows: usize, cols: usize) -> (usize, usize) {
        match self {
            ElementOrder::ColumnMajor => (index % rows, index / rows),
            ElementOrder::RowMajor => (index / cols, index % cols),
        }
    }
}

/// Planar uniform rectangular array.
///
/// The array lies in the plane orthogonal to `normal`. Columns run along the
/// horizontal in-plane axis `normal × ẑ`, rows run downwards; row 0 is the
/// top row. Positions are absolute, the phase reference is `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct UraGeometry {
    rows: usize,
    cols: usize,
    spacing: f64,
    center: Vec3,
    normal: Vec3,
    horizontal: Vec3,
    vertical: Vec3,
    order: ElementOrder,
    positions: Vec<Vec3>,
}

impl UraGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing: f64,
        center: Vec3,
        normal: Vec3,
        order: ElementOrder,
    ) -> Result<Self, GeoError> {
        if rows == 0 || cols == 0 {
            return Err(GeoError::Geometry(format!("empty array {rows}x{cols}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GeoError::Geometry(format!("spacing must be > 0, got {spacing}")));
        }
        let normal = normalize(normal).ok_or_else(|| GeoError::Geometry("zero normal".into()))?;
        let horizontal = normalize(cross(normal, [0.0, 0.0, 1.0]))
            .ok_or_else(|| GeoError::Geometry("array normal must not be vertical".into()))?;
        let vertical = cross(horizontal, normal);
        let mut positions = vec![[0.0; 3]; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let h = (c as f64 - (cols - 1) as f64 / 2.0) * spacing;
                let v = ((rows - 1) as f64 / 2.0 - r as f64) * spacing;
                positions[order.index(r, c, rows, cols)] =
                    add(center, add(scale(horizontal, h), scale(vertical, v)));
            }
        }
        Ok(UraGeometry {
            rows,
            cols,
            spacing,
            center,
            normal,
            horizontal,
            vertical,
            order,
            positions,
        })
    }

    /// Array described by a measurement configuration, facing `normal`.
    pub fn from_config(cfg: &MeasurementConfig, normal: Vec3, order: ElementOrder) -> Result<Self, GeoError> {
        Self::new(cfg.array_rows, cfg.array_cols, cfg.element_spacing, cfg.bs_position, normal, order)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn slot(&self, index: usize) -> (usize, usize) {
        self.order.slot(index, self.rows, self.cols)
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        self.order.index(row, col, self.rows, self.cols)
    }

    /// Unit vector for azimuth (from boresight, towards the column axis) and
    /// elevation (from the horizontal plane), both radians.
    pub fn direction(&self, azimuth: f64, elevation: f64) -> Vec3 {
        let (ce, se) = (elevation.cos(), elevation.sin());
        add(
            add(scale(self.horizontal, ce * azimuth.sin()), scale(self.normal, ce * azimuth.cos())),
            scale(self.vertical, se),
        )
    }

    /// Inverse of [`UraGeometry::direction`] for any nonzero vector.
    pub fn azimuth_elevation(&self, v: Vec3) -> (f64, f64) {
        let u = normalize(v).unwrap_or(self.normal);
        let el = dot(u, self.vertical).clamp(-1.0, 1.0).asin();
        let az = dot(u, self.horizontal).atan2(dot(u, self.normal));
        (az, el)
    }

    /// Unit-modulus response `exp(j·2π/λ · (p_m − center)·u)` per element.
    pub fn steering_towards(&self, u: Vec3, wavelength: f64) -> Vec<C64> {
        let k = 2.0 * PI / wavelength;
        self.positions
            .iter()
            .map(|p| {
                let rel = [p[0] - self.center[0], p[1] - self.center[1], p[2] - self.center[2]];
                C64::from_polar(1.0, k * dot(rel, u))
            })
            .collect()
    }
}

/// Far-field array response for a plane wave arriving from
/// `(azimuth, elevation)`.
pub fn steering_phase(
    ura: &UraGeometry,
    azimuth: f64,
    elevation: f64,
    wavelength: f64,
) -> Result<Vec<C64>, GeoError> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(GeoError::Geometry(format!("wavelength must be > 0, got {wavelength}")));
    }
    Ok(ura.steering_towards(ura.direction(azimuth, elevation), wavelength))
}
