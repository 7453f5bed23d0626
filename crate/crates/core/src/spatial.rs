//! Spatial stationarity over the array: normalized element correlation
//! `ρ_ij = |R_ij| / √(R_ii R_jj)`, per-element maps on the physical grid and
//! threshold regions.

use std::io::Write;

use thiserror::Error;

use crate::csv_out::{num, Table};
use crate::geo::ElementOrder;
use crate::temporal::AntennaCorrMatrix;

/// Inner threshold preset.
pub const RHO_HIGH: f64 = 0.85;
/// Outer threshold preset.
pub const RHO_LOW: f64 = 0.80;

#[derive(Debug, Error)]
pub enum SpatialError {
    #[error("element {0} has zero power")]
    DeadElement(usize),
    #[error("{rows}x{cols} grid does not match {dim} elements")]
    Grid { rows: usize, cols: usize, dim: usize },
    #[error("element ({row}, {col}) outside the {rows}x{cols} grid")]
    OutOfGrid { row: usize, col: usize, rows: usize, cols: usize },
    #[error("offset {offset} must be within 1..{dim}")]
    Offset { offset: usize, dim: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialCorr {
    dim: usize,
    rows: usize,
    cols: usize,
    order: ElementOrder,
    rho: Vec<f64>,
}

impl SpatialCorr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.dim + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    /// Full matrix as rows `i, j, rho`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), SpatialError> {
        let mut table = Table::new(sink, &["i", "j", "rho"])?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                table.row([i.to_string(), j.to_string(), num(self.get(i, j))])?;
            }
        }
        Ok(table.finish()?)
    }
}

pub fn spatial_corr(
    ra: &AntennaCorrMatrix,
    rows: usize,
    cols: usize,
    order: ElementOrder,
) -> Result<SpatialCorr, SpatialError> {
    let dim = ra.dim;
    if rows * cols != dim {
        return Err(SpatialError::Grid { rows, cols, dim });
    }
    let diag: Vec<f64> = (0..dim).map(|i| ra.get(i, i).re).collect();
    if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(SpatialError::DeadElement(i));
    }
    let mut rho = vec![0.0; dim * dim];
    for i in 0..dim {
        rho[i * dim + i] = 1.0;
        for j in i + 1..dim {
            let v = (ra.get(i, j).norm() / (diag[i] * diag[j]).sqrt()).min(1.0);
            rho[i * dim + j] = v;
            rho[j * dim + i] = v;
        }
    }
    Ok(SpatialCorr { dim, rows, cols, order, rho })
}

/// Real values on the physical grid, `values[row * cols + col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    pub rows: usize,
    pub cols: usize,
    pub reference: (usize, usize),
    pub values: Vec<f64>,
}

impl GridMap {
    pub fn new(rows: usize, cols: usize, reference: (usize, usize), values: Vec<f64>) -> Result<Self, SpatialError> {
        if values.len() != rows * cols {
            return Err(SpatialError::Grid { rows, cols, dim: values.len() });
        }
        check_slot(reference, rows, cols)?;
        Ok(GridMap { rows, cols, reference, values })
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Rows `row, col, value`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), SpatialError> {
        let mut table = Table::new(sink, &["row", "col", "value"])?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                table.row([r.to_string(), c.to_string(), num(self.at(r, c))])?;
            }
        }
        Ok(table.finish()?)
    }
}

fn check_slot((row, col): (usize, usize), rows: usize, cols: usize) -> Result<(), SpatialError> {
    if row >= rows || col >= cols {
        return Err(SpatialError::OutOfGrid { row, col, rows, cols });
    }
    Ok(())
}

/// Correlation of `element` with every other element, laid out on the grid.
pub fn element_map(corr: &SpatialCorr, element: (usize, usize)) -> Result<GridMap, SpatialError> {
    let (rows, cols) = corr.grid();
    check_slot(element, rows, cols)?;
    let i = corr.order.index(element.0, element.1, rows, cols);
    let mut values = vec![0.0; rows * cols];
    for j in 0..corr.dim {
        let (r, c) = corr.order.slot(j, rows, cols);
        values[r * cols + c] = corr.get(i, j);
    }
    Ok(GridMap { rows, cols, reference: element, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionMode {
    /// Cells above threshold reachable from the reference through
    /// edge-adjacent cells above threshold.
    #[default]
    Connected,
    /// Every cell above threshold.
    Superlevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrRegion {
    /// Cells in the region, reference excluded.
    pub count: usize,
    /// 0/1 per cell, reference included when it qualifies.
    pub mask: Vec<u8>,
}

/// Cells with `ρ > threshold`.
pub fn corr_region(map: &GridMap, threshold: f64, mode: RegionMode) -> CorrRegion {
    let (rows, cols) = (map.rows, map.cols);
    let above = |r: usize, c: usize| map.at(r, c) > threshold;
    let mut mask = vec![0u8; rows * cols];
    match mode {
        RegionMode::Superlevel => {
            for r in 0..rows {
                for c in 0..cols {
                    mask[r * cols + c] = u8::from(above(r, c));
                }
            }
        }
        RegionMode::Connected => {
            let (r0, c0) = map.reference;
            if above(r0, c0) {
                let mut stack = vec![(r0, c0)];
                mask[r0 * cols + c0] = 1;
                while let Some((r, c)) = stack.pop() {
                    let next = [
                        (r.wrapping_sub(1), c),
                        (r + 1, c),
                        (r, c.wrapping_sub(1)),
                        (r, c + 1),
                    ];
                    for (nr, nc) in next {
                        if nr < rows && nc < cols && mask[nr * cols + nc] == 0 && above(nr, nc) {
                            mask[nr * cols + nc] = 1;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
        }
    }
    let (r0, c0) = map.reference;
    let count = mask.iter().map(|&m| m as usize).sum::<usize>() - mask[r0 * cols + c0] as usize;
    CorrRegion { count, mask }
}

impl CorrRegion {
    /// Mask as a `rows × cols` 0/1 grid, one CSV line per row.
    pub fn write_csv<W: Write>(&self, cols: usize, sink: W) -> Result<(), SpatialError> {
        let header: Vec<String> = (0..cols).map(|c| format!("col{c}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut table = Table::new(sink, &header)?;
        for row in self.mask.chunks(cols) {
            table.row(row.iter().map(|m| m.to_string()))?;
        }
        Ok(table.finish()?)
    }
}

/// Mean of `ρ_{i, i+offset}` over all valid `i`.
pub fn offset_diagonal_score(corr: &SpatialCorr, offset: usize) -> Result<f64, SpatialError> {
    let dim = corr.dim;
    if offset == 0 || offset >= dim {
        return Err(SpatialError::Offset { offset, dim });
    }
    let n = dim - offset;
    Ok((0..n).map(|i| corr.get(i, i + offset)).sum::<f64>() / n as f64)
}
