use std::collections::HashMap;
use std::io::Write;
use std::ops::Range;

use super::{angle_to_bs, antenna_corr, AntennaCorrMatrix, TemporalError, DEFAULT_WINDOW};
use crate::csi::CsiTensor;
use crate::csv_out::{num, Table};
use crate::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapAxis {
    /// Travel distance `v·t`, m.
    Distance,
    /// Angle to the base station, degrees.
    Angle,
}

impl MapAxis {
    pub fn unit(self) -> &'static str {
        match self {
            MapAxis::Distance => "m",
            MapAxis::Angle => "deg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmdMapParams {
    pub window: usize,
    /// Frequency bins entering `R_a`; `None` uses all bins.
    pub band: Option<Range<usize>>,
    /// Distance axis: snapshots between reference positions.
    pub stride: usize,
    /// Angle axis: covered span, degrees.
    pub angle_span: (f64, f64),
    /// Angle axis: grid step, degrees.
    pub angle_step: f64,
    /// Base station position used for the angle axis.
    pub bs_position: [f64; 3],
}

impl Default for CmdMapParams {
    fn default() -> Self {
        CmdMapParams {
            window: DEFAULT_WINDOW,
            band: None,
            stride: DEFAULT_WINDOW,
            angle_span: (40.0, 140.0),
            angle_step: 0.1,
            bs_position: [0.0, 0.0, 11.0],
        }
    }
}

/// Pairwise CMD between reference positions along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CmdMap {
    pub axis: MapAxis,
    /// Axis coordinate of each reference (m or deg).
    pub positions: Vec<f64>,
    /// Snapshot starting each reference window.
    pub snapshots: Vec<usize>,
    /// Timestamp of each reference snapshot, s.
    pub times: Vec<f64>,
    /// Row-major `n × n` distances.
    pub values: Vec<f64>,
}

impl CmdMap {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    /// Builds a map from explicit values (row-major, `n × n`).
    pub fn from_values(axis: MapAxis, positions: Vec<f64>, times: Vec<f64>, values: Vec<f64>) -> Result<Self, TemporalError> {
        let n = positions.len();
        if values.len() != n * n || times.len() != n {
            return Err(TemporalError::Dimension(values.len(), n * n));
        }
        Ok(CmdMap { axis, snapshots: (0..n).collect(), positions, times, values })
    }

    /// Rows `pos_i, pos_j, value`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), TemporalError> {
        let unit = self.axis.unit();
        let (hi, hj) = (format!("pos_i_{unit}"), format!("pos_j_{unit}"));
        let mut table = Table::new(sink, &[hi.as_str(), hj.as_str(), "value"])?;
        for i in 0..self.len() {
            for j in 0..self.len() {
                table.row([num(self.positions[i]), num(self.positions[j]), num(self.get(i, j))])?;
            }
        }
        Ok(table.finish()?)
    }
}

pub fn cmd_map(
    tensor: &CsiTensor,
    positions: &[[f64; 3]],
    axis: MapAxis,
    params: &CmdMapParams,
) -> Result<CmdMap, TemporalError> {
    cmd_map_with(tensor, positions, axis, params, Execution::default())
}

/// CMD map over reference windows.
///
/// `positions` holds one aligned drone position per snapshot. On the
/// distance axis references start every `stride` snapshots; on the angle
/// axis a uniform grid over `angle_span` picks the nearest snapshot for each
/// grid angle.
pub fn cmd_map_with(
    tensor: &CsiTensor,
    positions: &[[f64; 3]],
    axis: MapAxis,
    params: &CmdMapParams,
    exec: Execution,
) -> Result<CmdMap, TemporalError> {
    let t = tensor.snapshots();
    let w = params.window;
    if w == 0 || w > t {
        return Err(TemporalError::WindowOverrun { start: 0, window: w, snapshots: t });
    }
    if positions.len() != t {
        return Err(TemporalError::Parameter(format!(
            "{} aligned positions for {t} snapshots",
            positions.len()
        )));
    }
    let band = params.band.clone().unwrap_or(0..tensor.bins());
    let last_start = t - w;

    let (axis_pos, snaps) = match axis {
        MapAxis::Distance => {
            let speed = tensor.config().speed;
            if !(speed > 0.0) {
                return Err(TemporalError::Parameter("distance axis needs speed > 0".into()));
            }
            if params.stride == 0 {
                return Err(TemporalError::Parameter("stride must be >= 1".into()));
            }
            let t0 = tensor.timestamps()[0];
            let snaps: Vec<usize> = (0..=last_start).step_by(params.stride).collect();
            let pos = snaps.iter().map(|&k| speed * (tensor.timestamps()[k] - t0)).collect();
            (pos, snaps)
        }
        MapAxis::Angle => angle_grid(positions, last_start, params)?,
    };

    // Windows shared by several grid points are computed once.
    let mut unique: Vec<usize> = snaps.clone();
    unique.sort_unstable();
    unique.dedup();
    let mats: Vec<Result<AntennaCorrMatrix, TemporalError>> =
        exec.map_range(unique.len(), |u| antenna_corr(tensor, unique[u], w, band.clone()));
    let mats = mats.into_iter().collect::<Result<Vec<_>, _>>()?;
    if mats.iter().any(|m| !(m.frobenius_norm() > 0.0)) {
        return Err(TemporalError::ZeroNorm);
    }
    let flat: Vec<Vec<f64>> = mats.iter().map(|m| m.unit_flat()).collect();
    let slot: HashMap<usize, usize> = unique.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let idx: Vec<usize> = snaps.iter().map(|s| slot[s]).collect();

    let values = pairwise_cmd(&flat, &idx);
    let times = snaps.iter().map(|&k| tensor.timestamps()[k]).collect();
    Ok(CmdMap { axis, positions: axis_pos, snapshots: snaps, times, values })
}

/// `1 − ⟨x_a, x_b⟩` for unit vectors `flat`, expanded to the references
/// `idx` through one Gram matrix.
fn pairwise_cmd(flat: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let u = flat.len();
    let k = flat.first().map_or(0, Vec::len);
    let x: Vec<f64> = flat.concat();
    let mut gram = vec![0.0; u * u];
    // x: u × k row-major; strides stay inside `x` and `gram`.
    unsafe {
        matrixmultiply::dgemm(
            u, k, u, 1.0,
            x.as_ptr(), k as isize, 1,
            x.as_ptr(), 1, k as isize,
            0.0, gram.as_mut_ptr(), u as isize, 1,
        );
    }
    let n = idx.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (idx[i].min(idx[j]), idx[i].max(idx[j]));
            let v = if a == b { 0.0 } else { (1.0 - gram[a * u + b]).clamp(0.0, 1.0) };
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    values
}

/// Nearest valid snapshot for each angle of the grid.
fn angle_grid(
    positions: &[[f64; 3]],
    last_start: usize,
    params: &CmdMapParams,
) -> Result<(Vec<f64>, Vec<usize>), TemporalError> {
    let (lo, hi) = params.angle_span;
    let step = params.angle_step;
    if !(step > 0.0) || !(hi > lo) {
        return Err(TemporalError::Parameter(format!("angle span {lo}..{hi} step {step}")));
    }
    let first = positions[0];
    let last = positions[positions.len() - 1];
    let dir = [last[0] - first[0], last[1] - first[1], last[2] - first[2]];
    let angles = (0..=last_start)
        .map(|k| angle_to_bs(positions[k], params.bs_position, dir))
        .collect::<Result<Vec<f64>, _>>()?;

    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
    let (min, max) = (angles[order[0]], angles[order[order.len() - 1]]);
    let tol = 0.5 * step;
    if lo < min - tol || hi > max + tol {
        return Err(TemporalError::Span { lo, hi, min, max });
    }

    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let mut grid = Vec::with_capacity(count);
    let mut snaps = Vec::with_capacity(count);
    for g in 0..count {
        let a = lo + g as f64 * step;
        let p = order.partition_point(|&k| angles[k] < a);
        let best = [p.checked_sub(1), (p < order.len()).then_some(p)]
            .into_iter()
            .flatten()
            .map(|q| order[q])
            .min_by(|&x, &y| (angles[x] - a).abs().total_cmp(&(angles[y] - a).abs()).then(x.cmp(&y)))
            .expect("non-empty trajectory");
        grid.push(a);
        snaps.push(best);
    }
    Ok((grid, snaps))
}
