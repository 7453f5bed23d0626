//! Delay-domain view of the CSI: impulse responses, instantaneous and
//! window-averaged power delay profiles, and received power.
//!
//! The inverse DFT is unitary (`1/√F`), so total power is identical in the
//! frequency and delay domains. Delay bin `n` sits at `n / B` seconds.

use std::io::Write;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::csi::CsiTensor;
use crate::csv_out::{num, Table};
use crate::{Execution, C64};

#[derive(Debug, Error)]
pub enum PdpError {
    #[error("averaging window {window} must be within 1..={snapshots}")]
    Window { window: usize, snapshots: usize },
    #[error("profile {0} is all zero")]
    ZeroProfile(usize),
    #[error("mismatched delay axes: {0} vs {1} bins")]
    Bins(usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `h(t, m, τ)`, laid out like the tensor it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub snapshots: usize,
    pub antennas: usize,
    pub bins: usize,
    /// Delay-bin width, s.
    pub delay_resolution: f64,
    pub data: Vec<C64>,
}

impl ImpulseResponse {
    pub fn tap(&self, t: usize, m: usize, n: usize) -> C64 {
        self.data[(t * self.antennas + m) * self.bins + n]
    }

    pub fn response(&self, t: usize, m: usize) -> &[C64] {
        let s = (t * self.antennas + m) * self.bins;
        &self.data[s..s + self.bins]
    }
}

/// `P(t, m, τ) = |h(t, m, τ)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousPdp {
    pub snapshots: usize,
    pub antennas: usize,
    pub bins: usize,
    pub delay_resolution: f64,
    pub power: Vec<f64>,
}

impl InstantaneousPdp {
    pub fn profile(&self, t: usize, m: usize) -> &[f64] {
        let s = (t * self.antennas + m) * self.bins;
        &self.power[s..s + self.bins]
    }
}

/// Averaged profiles `P_h(t_i, τ)` for `i = 0 ..= T − W`, each the mean over
/// `W` snapshots starting at `t_i` and over all antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct PdpSeries {
    /// Delay of each bin, s.
    pub delays: Vec<f64>,
    /// Timestamp of the first snapshot of each window.
    pub times: Vec<f64>,
    pub window: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    /// Sum over all delay bins.
    Total,
    /// Power of delay bin 0 (call [`PdpSeries::rereferenced`] first).
    LosTap,
}

struct Ifft {
    plan: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Ifft {
    fn new(n: usize) -> Self {
        Ifft {
            plan: FftPlanner::new().plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    fn run(&self, buf: &mut [C64]) {
        self.plan.process(buf);
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
    }
}

pub fn impulse_response(tensor: &CsiTensor) -> ImpulseResponse {
    impulse_response_with(tensor, Execution::default())
}

/// Unitary inverse DFT over the frequency axis of every `(t, m)` response.
pub fn impulse_response_with(tensor: &CsiTensor, exec: Execution) -> ImpulseResponse {
    let nf = tensor.bins();
    let ifft = Ifft::new(nf);
    let mut data = tensor.data().to_vec();
    exec.for_each_chunk_mut(&mut data, nf * tensor.antennas(), |_, block| {
        for row in block.chunks_exact_mut(nf) {
            ifft.run(row);
        }
    });
    ImpulseResponse {
        snapshots: tensor.snapshots(),
        antennas: tensor.antennas(),
        bins: nf,
        delay_resolution: tensor.config().delay_resolution(),
        data,
    }
}

pub fn instantaneous_pdp(h: &ImpulseResponse) -> InstantaneousPdp {
    InstantaneousPdp {
        snapshots: h.snapshots,
        antennas: h.antennas,
        bins: h.bins,
        delay_resolution: h.delay_resolution,
        power: h.data.iter().map(|z| z.norm_sqr()).collect(),
    }
}

/// Window average of an instantaneous PDP. `times` gives one timestamp per
/// snapshot.
pub fn averaged_pdp(p: &InstantaneousPdp, window: usize, times: &[f64]) -> Result<PdpSeries, PdpError> {
    let per_snapshot: Vec<f64> = (0..p.snapshots)
        .flat_map(|t| {
            (0..p.bins).map(move |n| (0..p.antennas).map(|m| p.profile(t, m)[n]).sum::<f64>())
        })
        .collect();
    sliding_average(per_snapshot, p.snapshots, p.antennas, p.bins, p.delay_resolution, window, times)
}

pub fn averaged_pdp_from_csi(tensor: &CsiTensor, window: usize) -> Result<PdpSeries, PdpError> {
    averaged_pdp_from_csi_with(tensor, window, Execution::default())
}

/// Same result as `averaged_pdp(instantaneous_pdp(impulse_response(x)))`
/// without materializing `h` for the whole tensor.
pub fn averaged_pdp_from_csi_with(tensor: &CsiTensor, window: usize, exec: Execution) -> Result<PdpSeries, PdpError> {
    let (t_count, m_count, nf) = (tensor.snapshots(), tensor.antennas(), tensor.bins());
    if window == 0 || window > t_count {
        return Err(PdpError::Window { window, snapshots: t_count });
    }
    let ifft = Ifft::new(nf);
    let mut per_snapshot = vec![0.0; t_count * nf];
    exec.for_each_chunk_mut(&mut per_snapshot, nf, |t, acc| {
        let mut buf = vec![C64::default(); nf];
        for m in 0..m_count {
            buf.copy_from_slice(tensor.response(t, m));
            ifft.run(&mut buf);
            for (a, z) in acc.iter_mut().zip(&buf) {
                *a += z.norm_sqr();
            }
        }
    });
    sliding_average(
        per_snapshot,
        t_count,
        m_count,
        nf,
        tensor.config().delay_resolution(),
        window,
        tensor.timestamps(),
    )
}

fn sliding_average(
    per_snapshot: Vec<f64>,
    t_count: usize,
    m_count: usize,
    nf: usize,
    resolution: f64,
    window: usize,
    times: &[f64],
) -> Result<PdpSeries, PdpError> {
    if window == 0 || window > t_count {
        return Err(PdpError::Window { window, snapshots: t_count });
    }
    let n_out = t_count - window + 1;
    let norm = 1.0 / (m_count * window) as f64;
    let mut values = vec![0.0; n_out * nf];
    // Direct sums per window keep each output independent of its neighbours'
    // rounding; W is small.
    for i in 0..n_out {
        let out = &mut values[i * nf..(i + 1) * nf];
        for k in i..i + window {
            for (o, v) in out.iter_mut().zip(&per_snapshot[k * nf..(k + 1) * nf]) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= norm);
    }
    Ok(PdpSeries {
        delays: (0..nf).map(|n| n as f64 * resolution).collect(),
        times: times.iter().take(n_out).copied().collect(),
        window,
        values,
    })
}

impl PdpSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn bins(&self) -> usize {
        self.delays.len()
    }

    pub fn profile(&self, i: usize) -> &[f64] {
        let nf = self.bins();
        &self.values[i * nf..(i + 1) * nf]
    }

    /// The profiles at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PdpSeries {
        PdpSeries {
            delays: self.delays.clone(),
            times: indices.iter().map(|&i| self.times[i]).collect(),
            window: self.window,
            values: indices.iter().flat_map(|&i| self.profile(i).iter().copied()).collect(),
        }
    }

    /// Bin of the strongest tap of the trajectory-averaged profile.
    pub fn strongest_bin(&self) -> usize {
        let nf = self.bins();
        let mut mean = vec![0.0; nf];
        for i in 0..self.len() {
            for (a, v) in mean.iter_mut().zip(self.profile(i)) {
                *a += v;
            }
        }
        mean.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(n, _)| n)
            .unwrap_or(0)
    }

    /// Circularly shifts the delay axis so the trajectory's strongest bin
    /// becomes relative delay 0. Returns the shifted series and the shift.
    pub fn rereferenced(&self) -> (PdpSeries, usize) {
        let shift = self.strongest_bin();
        let nf = self.bins();
        let mut values = vec![0.0; self.values.len()];
        for i in 0..self.len() {
            let src = self.profile(i);
            let dst = &mut values[i * nf..(i + 1) * nf];
            for n in 0..nf {
                dst[n] = src[(n + shift) % nf];
            }
        }
        (
            PdpSeries {
                delays: self.delays.clone(),
                times: self.times.clone(),
                window: self.window,
                values,
            },
            shift,
        )
    }

    /// Received power per window. With `normalize_db` the result is in dB
    /// relative to the trajectory maximum (so the maximum is 0 dB).
    pub fn received_power(&self, mode: PowerMode, normalize_db: bool) -> Result<Vec<f64>, PdpError> {
        let linear: Vec<f64> = (0..self.len())
            .map(|i| {
                let p = self.profile(i);
                match mode {
                    PowerMode::Total => p.iter().sum(),
                    PowerMode::LosTap => p[0],
                }
            })
            .collect();
        if !normalize_db {
            return Ok(linear);
        }
        let peak = linear.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(PdpError::ZeroProfile(0));
        }
        Ok(linear.iter().map(|p| 10.0 * (p / peak).log10()).collect())
    }

    /// Rows `t_s, tau_s, value` in linear power.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), PdpError> {
        let mut table = Table::new(sink, &["t_s", "tau_s", "value"])?;
        for i in 0..self.len() {
            for (tau, v) in self.delays.iter().zip(self.profile(i)) {
                table.row([num(self.times[i]), num(*tau), num(*v)])?;
            }
        }
        Ok(table.finish()?)
    }

    /// Rows `t_s, tau_s, value_db`, normalized to the global maximum of the
    /// trajectory. Zero-power taps are written as `-inf`.
    pub fn write_csv_db<W: Write>(&self, sink: W) -> Result<(), PdpError> {
        let peak = self.values.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(PdpError::ZeroProfile(0));
        }
        let mut table = Table::new(sink, &["t_s", "tau_s", "value_db"])?;
        for i in 0..self.len() {
            for (tau, v) in self.delays.iter().zip(self.profile(i)) {
                table.row([num(self.times[i]), num(*tau), num(10.0 * (v / peak).log10())])?;
            }
        }
        Ok(table.finish()?)
    }
}

/// Zeroes taps more than `clip_db` below the profile's peak.
pub fn clip_noise(profile: &[f64], clip_db: f64) -> Vec<f64> {
    let peak = profile.iter().copied().fold(0.0, f64::max);
    let floor = peak * 10f64.powf(-clip_db / 10.0);
    profile.iter().map(|&p| if p < floor { 0.0 } else { p }).collect()
}

/// Finer-grained PDP of one response by zero-padding the spectrum to
/// `factor · F` bins. For plotting only; the analyses use the unpadded axis.
pub fn zero_padded_pdp(response: &[C64], factor: usize) -> Vec<f64> {
    let n = response.len() * factor.max(1);
    let mut buf = vec![C64::default(); n];
    buf[..response.len()].copy_from_slice(response);
    Ifft::new(n).run(&mut buf);
    buf.iter().map(|z| z.norm_sqr()).collect()
}
