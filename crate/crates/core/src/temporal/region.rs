use std::io::Write;

use super::{CmdMap, MapAxis, TemporalError};
use crate::csv_out::{num, Table};

/// Quasi-stationary interval around one reference position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryRegion {
    pub index: usize,
    pub position: f64,
    /// Bounding references: the first on each side whose CMD to `index`
    /// reaches the threshold, or the ends of the map.
    pub lower: usize,
    pub upper: usize,
    /// Stationary distance (m) on the distance axis, stationary angle (deg)
    /// on the angle axis.
    pub extent: f64,
    /// `extent` over the total span of the map, in [0, 1].
    pub normalized: f64,
}

/// Contiguous low-CMD region around every reference position.
///
/// Scanning outward from `i`, each bound is the first reference whose CMD to
/// `i` reaches `c_th`, clamped to the ends of the map. On the distance axis
/// the extent is `v · (t_max − t_min)`; on the angle axis it is the angular
/// span between the bounds.
pub fn stationary_region(map: &CmdMap, c_th: f64, speed: f64) -> Result<Vec<StationaryRegion>, TemporalError> {
    if !(c_th > 0.0 && c_th < 1.0) {
        return Err(TemporalError::Parameter(format!("c_th must be in (0, 1), got {c_th}")));
    }
    let n = map.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let extent_of = |lo: usize, hi: usize| match map.axis {
        MapAxis::Distance => speed * (map.times[hi] - map.times[lo]),
        MapAxis::Angle => (map.positions[hi] - map.positions[lo]).abs(),
    };
    let total = extent_of(0, n - 1);
    Ok((0..n)
        .map(|i| {
            let lower = (0..i).rev().find(|&j| map.get(i, j) >= c_th).unwrap_or(0);
            let upper = (i + 1..n).find(|&j| map.get(i, j) >= c_th).unwrap_or(n - 1);
            let extent = extent_of(lower, upper);
            let normalized = if total > 0.0 { (extent / total).clamp(0.0, 1.0) } else { 1.0 };
            StationaryRegion { index: i, position: map.positions[i], lower, upper, extent, normalized }
        })
        .collect())
}

/// One row of the combined stationarity report, keyed by the distance-axis
/// reference positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityRow {
    pub position_m: f64,
    pub angle_deg: f64,
    pub sd_m: f64,
    /// NaN where the position falls outside the angle grid.
    pub sa_deg: f64,
    pub sn_dist: f64,
    pub sn_angle: f64,
}

/// Joins distance-axis regions with the angle-axis region nearest in angle.
/// `angles` gives the angle to the base station of each distance reference.
pub fn stationarity_report(
    distance: &[StationaryRegion],
    angles: &[f64],
    angle: &[StationaryRegion],
    angle_step: f64,
) -> Vec<StationarityRow> {
    distance
        .iter()
        .zip(angles)
        .map(|(d, &a)| {
            let nearest = angle
                .iter()
                .min_by(|x, y| (x.position - a).abs().total_cmp(&(y.position - a).abs()));
            let (sa, sn) = match nearest {
                Some(r) if (r.position - a).abs() <= angle_step => (r.extent, r.normalized),
                _ => (f64::NAN, f64::NAN),
            };
            StationarityRow {
                position_m: d.position,
                angle_deg: a,
                sd_m: d.extent,
                sa_deg: sa,
                sn_dist: d.normalized,
                sn_angle: sn,
            }
        })
        .collect()
}

impl StationarityRow {
    pub fn write_csv<W: Write>(rows: &[StationarityRow], sink: W) -> Result<(), TemporalError> {
        let mut table = Table::new(sink, &["position_m", "angle_deg", "SD_m", "SA_deg", "S_N_dist", "S_N_angle"])?;
        for r in rows {
            table.row([r.position_m, r.angle_deg, r.sd_m, r.sa_deg, r.sn_dist, r.sn_angle].map(num))?;
        }
        Ok(table.finish()?)
    }
}
