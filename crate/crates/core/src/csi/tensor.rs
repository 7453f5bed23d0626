use super::{CsiError, MeasurementConfig};
use crate::C64;

/// Channel frequency response `H(t, m, Δf)` over `T` snapshots, `M` antennas
/// and `F` frequency bins, stored row-major in `(t, m, f)` order.
///
/// Immutable once built; share it by reference across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTensor {
    config: MeasurementConfig,
    timestamps: Vec<f64>,
    data: Vec<C64>,
}

impl CsiTensor {
    pub fn new(config: MeasurementConfig, timestamps: Vec<f64>, data: Vec<C64>) -> Result<Self, CsiError> {
        config.validate()?;
        let t = timestamps.len();
        let expected = t * config.num_antennas * config.num_freq_bins;
        if data.len() != expected {
            return Err(CsiError::Dimension(format!(
                "data has {} samples, expected {t}x{}x{} = {expected}",
                data.len(),
                config.num_antennas,
                config.num_freq_bins
            )));
        }
        if t == 0 {
            return Err(CsiError::Tensor("tensor has no snapshots".into()));
        }
        if let Some(i) = timestamps.iter().position(|v| !v.is_finite()) {
            return Err(CsiError::Tensor(format!("timestamp {i} is not finite")));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(CsiError::Tensor(format!(
                "timestamps not strictly increasing at snapshot {}",
                i + 1
            )));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            let (tt, m, f) = unravel(i, config.num_antennas, config.num_freq_bins);
            return Err(CsiError::Tensor(format!("non-finite sample at ({tt}, {m}, {f})")));
        }
        Ok(CsiTensor { config, timestamps, data })
    }

    /// Tensor with timestamps `t · csi_interval`, filled by `f(t, m, bin)`.
    pub fn from_fn(
        config: MeasurementConfig,
        snapshots: usize,
        mut f: impl FnMut(usize, usize, usize) -> C64,
    ) -> Result<Self, CsiError> {
        let (m, nf) = (config.num_antennas, config.num_freq_bins);
        let mut data = Vec::with_capacity(snapshots * m * nf);
        for t in 0..snapshots {
            for a in 0..m {
                for k in 0..nf {
                    data.push(f(t, a, k));
                }
            }
        }
        let ts = (0..snapshots).map(|t| t as f64 * config.csi_interval).collect();
        Self::new(config, ts, data)
    }

    pub fn config(&self) -> &MeasurementConfig {
        &self.config
    }

    pub fn snapshots(&self) -> usize {
        self.timestamps.len()
    }

    pub fn antennas(&self) -> usize {
        self.config.num_antennas
    }

    pub fn bins(&self) -> usize {
        self.config.num_freq_bins
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_parts(self) -> (MeasurementConfig, Vec<f64>, Vec<C64>) {
        (self.config, self.timestamps, self.data)
    }

    #[inline]
    pub fn get(&self, t: usize, m: usize, f: usize) -> C64 {
        self.data[(t * self.antennas() + m) * self.bins() + f]
    }

    /// The `M × F` block of snapshot `t`, antenna-major.
    pub fn snapshot(&self, t: usize) -> &[C64] {
        let n = self.antennas() * self.bins();
        &self.data[t * n..(t + 1) * n]
    }

    /// Frequency response of antenna `m` at snapshot `t`.
    pub fn response(&self, t: usize, m: usize) -> &[C64] {
        let start = (t * self.antennas() + m) * self.bins();
        &self.data[start..start + self.bins()]
    }

    /// Copies the `M`-element array vector at `(t, f)` into `out`.
    pub fn array_vector_into(&self, t: usize, f: usize, out: &mut [C64]) {
        let snap = self.snapshot(t);
        let nf = self.bins();
        for (m, o) in out.iter_mut().enumerate() {
            *o = snap[m * nf + f];
        }
    }

    /// Sub-tensor of snapshots `start..end`.
    pub fn slice_snapshots(&self, start: usize, end: usize) -> Result<CsiTensor, CsiError> {
        if start >= end || end > self.snapshots() {
            return Err(CsiError::Tensor(format!(
                "snapshot range {start}..{end} outside 0..{}",
                self.snapshots()
            )));
        }
        let n = self.antennas() * self.bins();
        Ok(CsiTensor {
            config: self.config.clone(),
            timestamps: self.timestamps[start..end].to_vec(),
            data: self.data[start * n..end * n].to_vec(),
        })
    }

    pub fn total_power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn unravel(i: usize, m: usize, f: usize) -> (usize, usize, usize) {
    (i / (m * f), (i / f) % m, i % f)
}
