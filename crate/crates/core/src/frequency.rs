//! Frequency-domain stationarity: RMS delay spread of the averaged PDP,
//! the frequency correlation function, coherence bandwidth and the α factor
//! in `B_coh = 1 / (α · S_τ)`.

use std::io::Write;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::csi::CsiTensor;
use crate::csv_out::{num, Table};
use crate::pdp::{clip_noise, PdpSeries};
use crate::stats::ecdf;
use crate::{Execution, C64};

/// Correlation level defining the coherence bandwidth.
pub const COHERENCE_LEVEL: f64 = 0.367_879_441_171_442_33;

#[derive(Debug, Error)]
pub enum FrequencyError {
    #[error("profile {0} is all zero")]
    ZeroProfile(usize),
    #[error("profile has {profile} bins but the delay axis has {delays}")]
    Bins { profile: usize, delays: usize },
    #[error("window {window} at snapshot {start} overruns {snapshots} snapshots")]
    WindowOverrun { start: usize, window: usize, snapshots: usize },
    #[error("alpha needs positive means, got S_tau = {delay_spread}, B_coh = {coherence_bandwidth}")]
    ZeroMean { delay_spread: f64, coherence_bandwidth: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Moments of one averaged PDP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayStats {
    /// `P_m`, total power.
    pub power: f64,
    /// `T_m`, mean delay, s.
    pub mean_delay: f64,
    /// `S_τ`, RMS delay spread, s.
    pub rms_spread: f64,
}

/// Power, mean delay and RMS delay spread of `profile` on the delay axis
/// `delays`. Clipping is the caller's business, see [`delay_stats_series`].
pub fn delay_spread(profile: &[f64], delays: &[f64]) -> Result<DelayStats, FrequencyError> {
    if profile.len() != delays.len() {
        return Err(FrequencyError::Bins { profile: profile.len(), delays: delays.len() });
    }
    let power: f64 = profile.iter().sum();
    if !(power > 0.0) {
        return Err(FrequencyError::ZeroProfile(0));
    }
    // Moments about the strongest tap keep a lone tap exact.
    let peak = (0..profile.len()).max_by(|&a, &b| profile[a].total_cmp(&profile[b])).unwrap_or(0);
    let origin = delays[peak];
    let mean_delay = origin + profile.iter().zip(delays).map(|(p, t)| p * (t - origin)).sum::<f64>() / power;
    let var = profile.iter().zip(delays).map(|(p, t)| p * (t - mean_delay).powi(2)).sum::<f64>() / power;
    Ok(DelayStats { power, mean_delay, rms_spread: var.max(0.0).sqrt() })
}

/// Delay axis of a re-referenced profile with the upper half read as
/// negative relative delays, so leakage just before the reference tap is not
/// mistaken for a late echo.
pub fn signed_delays(delays: &[f64]) -> Vec<f64> {
    let n = delays.len();
    let step = if n > 1 { delays[1] - delays[0] } else { 0.0 };
    (0..n)
        .map(|k| if 2 * k >= n { delays[k] - n as f64 * step } else { delays[k] })
        .collect()
}

/// Delay statistics of the selected profiles of a re-referenced `series`
/// after clipping everything `clip_db` below each profile's peak. Moments use
/// [`signed_delays`].
pub fn delay_stats_series(series: &PdpSeries, indices: &[usize], clip_db: f64) -> Result<Vec<DelayStats>, FrequencyError> {
    let delays = signed_delays(&series.delays);
    indices
        .iter()
        .map(|&i| {
            let clipped = clip_noise(series.profile(i), clip_db);
            delay_spread(&clipped, &delays).map_err(|e| match e {
                FrequencyError::ZeroProfile(_) => FrequencyError::ZeroProfile(i),
                e => e,
            })
        })
        .collect()
}

/// `R_f(δ)` for lags `δ ∈ (−F, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqCorr {
    /// Frequency step per lag, Hz.
    pub lag_spacing: f64,
    /// `values[δ + F − 1]`.
    values: Vec<C64>,
}

impl FreqCorr {
    pub fn max_lag(&self) -> usize {
        self.values.len() / 2
    }

    pub fn at(&self, lag: isize) -> C64 {
        self.values[(lag + self.max_lag() as isize) as usize]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `|R_f(δ)| / R_f(0)` for `δ = −max_lag ..= max_lag`.
    pub fn normalized_magnitude(&self) -> Vec<f64> {
        let r0 = self.at(0).re;
        self.values.iter().map(|z| if r0 > 0.0 { z.norm() / r0 } else { 0.0 }).collect()
    }
}

struct Autocorr {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl Autocorr {
    fn new(bins: usize) -> Self {
        let len = (2 * bins).next_power_of_two();
        let mut planner = FftPlanner::new();
        Autocorr { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len), len }
    }

    fn run(&self, tensor: &CsiTensor, start: usize, window: usize) -> FreqCorr {
        let f = tensor.bins();
        let mut spectrum = vec![0.0; self.len];
        let mut buf = vec![C64::default(); self.len];
        for t in start..start + window {
            for m in 0..tensor.antennas() {
                buf[..f].copy_from_slice(tensor.response(t, m));
                buf[f..].fill(C64::default());
                self.forward.process(&mut buf);
                for (s, z) in spectrum.iter_mut().zip(&buf) {
                    *s += z.norm_sqr();
                }
            }
        }
        let mut acf: Vec<C64> = spectrum.into_iter().map(|s| C64::new(s, 0.0)).collect();
        self.inverse.process(&mut acf);
        // acf[n] = Σ H(f+n)·conj(H(f)), so R_f(δ) = acf[−δ].
        let scale = 1.0 / (self.len * window * tensor.antennas()) as f64;
        let values = (-(f as isize - 1)..f as isize)
            .map(|lag| {
                let idx = (-lag).rem_euclid(self.len as isize) as usize;
                acf[idx] * (scale / (f - lag.unsigned_abs()) as f64)
            })
            .collect();
        FreqCorr { lag_spacing: tensor.config().bin_spacing(), values }
    }
}

/// Frequency correlation over the `window` snapshots starting at `start`,
/// averaged over antennas and snapshots, each lag divided by its overlap.
pub fn freq_corr(tensor: &CsiTensor, start: usize, window: usize) -> Result<FreqCorr, FrequencyError> {
    check_window(tensor, start, window)?;
    Ok(Autocorr::new(tensor.bins()).run(tensor, start, window))
}

pub fn freq_corr_series(tensor: &CsiTensor, starts: &[usize], window: usize) -> Result<Vec<FreqCorr>, FrequencyError> {
    freq_corr_series_with(tensor, starts, window, Execution::default())
}

pub fn freq_corr_series_with(
    tensor: &CsiTensor,
    starts: &[usize],
    window: usize,
    exec: Execution,
) -> Result<Vec<FreqCorr>, FrequencyError> {
    for &s in starts {
        check_window(tensor, s, window)?;
    }
    let engine = Autocorr::new(tensor.bins());
    Ok(exec.map_range(starts.len(), |i| engine.run(tensor, starts[i], window)))
}

fn check_window(tensor: &CsiTensor, start: usize, window: usize) -> Result<(), FrequencyError> {
    if window == 0 || start + window > tensor.snapshots() {
        return Err(FrequencyError::WindowOverrun { start, window, snapshots: tensor.snapshots() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceBandwidth {
    /// `B_coh`, Hz.
    pub value: f64,
    /// First crossing above zero lag, Hz (`None` if never crossed).
    pub upper: Option<f64>,
    /// First crossing below zero lag, Hz, negative.
    pub lower: Option<f64>,
    /// No crossing on at least one side; `value` is the full bandwidth.
    pub saturated: bool,
}

/// Half the two-sided span between the first `1/e` crossings of
/// `|R_f| / R_f(0)`, interpolated linearly between lags.
pub fn coherence_bandwidth(rf: &FreqCorr, bandwidth: f64) -> CoherenceBandwidth {
    let mag = rf.normalized_magnitude();
    let zero = rf.max_lag();
    let crossing = |step: isize| -> Option<f64> {
        let mut prev = mag[zero];
        for k in 1..=zero {
            let cur = mag[(zero as isize + step * k as isize) as usize];
            if cur <= COHERENCE_LEVEL {
                let frac = if prev > cur { (prev - COHERENCE_LEVEL) / (prev - cur) } else { 1.0 };
                return Some(step as f64 * ((k - 1) as f64 + frac) * rf.lag_spacing);
            }
            prev = cur;
        }
        None
    };
    let (upper, lower) = (crossing(1), crossing(-1));
    match (upper, lower) {
        (Some(u), Some(l)) => CoherenceBandwidth { value: 0.5 * (u - l), upper, lower, saturated: false },
        _ => CoherenceBandwidth { value: bandwidth, upper, lower, saturated: true },
    }
}

/// `α = 1 / (B_coh · S_τ)`.
pub fn alpha_factor(mean_delay_spread: f64, mean_coherence_bandwidth: f64) -> Result<f64, FrequencyError> {
    if !(mean_delay_spread > 0.0 && mean_coherence_bandwidth > 0.0) {
        return Err(FrequencyError::ZeroMean {
            delay_spread: mean_delay_spread,
            coherence_bandwidth: mean_coherence_bandwidth,
        });
    }
    Ok(1.0 / (mean_coherence_bandwidth * mean_delay_spread))
}

/// Per-position frequency statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyRow {
    pub position_m: f64,
    pub delay_spread: f64,
    pub coherence_bandwidth: f64,
    pub saturated: bool,
}

impl FrequencyRow {
    /// Columns `position_m, S_tau_ns, B_coh_MHz, saturated`.
    pub fn write_csv<W: Write>(rows: &[FrequencyRow], sink: W) -> Result<(), FrequencyError> {
        let mut table = Table::new(sink, &["position_m", "S_tau_ns", "B_coh_MHz", "saturated"])?;
        for r in rows {
            table.row([
                num(r.position_m),
                num(r.delay_spread * 1e9),
                num(r.coherence_bandwidth * 1e-6),
                u8::from(r.saturated).to_string(),
            ])?;
        }
        Ok(table.finish()?)
    }
}

/// Empirical CDF with columns `value, probability`.
pub fn write_cdf<W: Write>(values: &[f64], sink: W) -> Result<(), FrequencyError> {
    let mut table = Table::new(sink, &["value", "probability"])?;
    for (v, p) in ecdf(values) {
        table.row([num(v), num(p)])?;
    }
    Ok(table.finish()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::MeasurementConfig;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg(m: usize) -> MeasurementConfig {
        MeasurementConfig { num_antennas: m, array_rows: 1, array_cols: m, ..Default::default() }
    }

    fn axis(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    /// Nested-loop reference for `R_f`.
    fn brute(x: &CsiTensor, start: usize, w: usize) -> Vec<C64> {
        let f = x.bins() as isize;
        (-(f - 1)..f)
            .map(|d| {
                let mut s = C64::default();
                for t in start..start + w {
                    for m in 0..x.antennas() {
                        let h = x.response(t, m);
                        for k in 0..f {
                            if (0..f).contains(&(k + d)) {
                                s += h[k as usize] * h[(k + d) as usize].conj();
                            }
                        }
                    }
                }
                s / ((w * x.antennas()) as f64 * (f - d.abs()) as f64)
            })
            .collect()
    }

    #[test]
    fn single_tap_has_zero_spread() {
        let mut p = vec![0.0; 100];
        p[17] = 3.0;
        let s = delay_spread(&p, &axis(100, 1.0 / 18e6)).unwrap();
        assert_eq!(s.rms_spread, 0.0);
        assert_eq!(s.power, 3.0);
    }

    #[test]
    fn two_taps_give_half_spacing() {
        let dt = 1.0 / 18e6;
        let mut p = vec![0.0; 100];
        p[0] = 1.0;
        p[7] = 1.0;
        let s = delay_spread(&p, &axis(100, dt)).unwrap();
        let want = 3.5 * dt;
        assert!((s.rms_spread - want).abs() <= 1e-12 * want);
        assert!((s.mean_delay - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn exponential_profile_spread_matches_sigma() {
        let sigma = 200e-9;
        let n = 512;
        let dt = 10.0 * sigma / n as f64;
        let d = axis(n, dt);
        let p: Vec<f64> = d.iter().map(|t| (-t / sigma).exp()).collect();
        let s = delay_spread(&p, &d).unwrap();
        assert!((s.rms_spread / sigma - 1.0).abs() < 0.02, "{}", s.rms_spread);
    }

    #[test]
    fn signed_axis_wraps_upper_half() {
        let d = signed_delays(&axis(6, 1.0));
        assert_eq!(d, vec![0.0, 1.0, 2.0, -3.0, -2.0, -1.0]);
        // Leakage one bin before the reference tap is one bin away, not F − 1.
        let mut p = vec![0.0; 6];
        p[0] = 1.0;
        p[5] = 1.0;
        assert_eq!(delay_spread(&p, &d).unwrap().rms_spread, 0.5);
    }

    #[test]
    fn zero_profile_is_an_error() {
        assert!(matches!(delay_spread(&[0.0; 4], &axis(4, 1.0)), Err(FrequencyError::ZeroProfile(_))));
        assert!(matches!(delay_spread(&[1.0; 4], &axis(3, 1.0)), Err(FrequencyError::Bins { .. })));
    }

    #[test]
    fn fft_matches_nested_loops() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x = CsiTensor::from_fn(
            MeasurementConfig { num_freq_bins: 37, ..cfg(3) },
            6,
            |_, _, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
        .unwrap();
        let rf = freq_corr(&x, 1, 4).unwrap();
        for (a, b) in rf.values().iter().zip(brute(&x, 1, 4)) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(rf.max_lag(), 36);
        assert!(rf.at(0).im.abs() < 1e-12);
    }

    #[test]
    fn flat_channel_saturates() {
        let x = CsiTensor::from_fn(cfg(2), 3, |_, _, _| C64::new(1.0, 0.0)).unwrap();
        let rf = freq_corr(&x, 0, 3).unwrap();
        assert!(rf.normalized_magnitude().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let b = coherence_bandwidth(&rf, 18e6);
        assert!(b.saturated);
        assert_eq!(b.value, 18e6);
    }

    #[test]
    fn single_delayed_tap_has_flat_magnitude() {
        let c = cfg(1);
        let x = CsiTensor::from_fn(c.clone(), 1, |_, _, f| C64::from_polar(1.0, -2.0 * PI * c.bin_frequency(f) * 400e-9))
            .unwrap();
        let rf = freq_corr(&x, 0, 1).unwrap();
        assert!(rf.normalized_magnitude().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    /// Two equal taps; antenna `m` carries relative phase `2πm/M` so the
    /// cross terms cancel and `|R_f(δ)|/R_f(0) = |cos(π δΔf τ₀)|` exactly.
    fn two_tap(tau0: f64) -> CsiTensor {
        let c = cfg(4);
        let m_count = c.num_antennas as f64;
        CsiTensor::from_fn(c.clone(), 1, |_, m, f| {
            let psi = 2.0 * PI * m as f64 / m_count;
            C64::new(1.0, 0.0) + C64::from_polar(1.0, psi - 2.0 * PI * c.bin_frequency(f) * tau0)
        })
        .unwrap()
    }

    #[test]
    fn two_tap_correlation_is_cosine() {
        let tau0 = 300e-9;
        let rf = freq_corr(&two_tap(tau0), 0, 1).unwrap();
        let mag = rf.normalized_magnitude();
        for (k, v) in mag.iter().enumerate() {
            let d = k as f64 - rf.max_lag() as f64;
            assert!((v - (PI * d * rf.lag_spacing * tau0).cos().abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn two_tap_crossing_matches_closed_form() {
        let mut last = f64::INFINITY;
        for tau0 in [100e-9, 300e-9, 600e-9] {
            let rf = freq_corr(&two_tap(tau0), 0, 1).unwrap();
            let b = coherence_bandwidth(&rf, 18e6);
            let want = COHERENCE_LEVEL.acos() / (PI * tau0);
            assert!(!b.saturated);
            assert!((b.value - want).abs() < rf.lag_spacing, "{tau0}: {} vs {want}", b.value);
            assert!((b.upper.unwrap() + b.lower.unwrap()).abs() < 1e-6);
            assert!(b.value < last);
            last = b.value;
        }
    }

    #[test]
    fn exponential_channel_alpha() {
        // 10 ns delay grid, σ = 200 ns, taps to 10σ. Tap phases 2π·m·n/M
        // cancel the cross terms when M exceeds the tap count.
        let sigma = 200e-9;
        let taps = 200;
        let c = MeasurementConfig {
            bandwidth: 100e6,
            num_freq_bins: 1000,
            num_antennas: 256,
            array_rows: 16,
            array_cols: 16,
            ..Default::default()
        };
        let dt = c.delay_resolution();
        let m_count = c.num_antennas as f64;
        let amps: Vec<f64> = (0..taps).map(|n| (-(n as f64) * dt / sigma).exp().sqrt()).collect();
        let x = CsiTensor::from_fn(c.clone(), 1, |_, m, f| {
            let fk = c.bin_frequency(f);
            amps.iter()
                .enumerate()
                .map(|(n, a)| {
                    let phase = 2.0 * PI * (m * n) as f64 / m_count - 2.0 * PI * fk * n as f64 * dt;
                    C64::from_polar(*a, phase)
                })
                .sum()
        })
        .unwrap();
        let power: Vec<f64> = amps.iter().map(|a| a * a).collect();
        let s = delay_spread(&power, &axis(taps, dt)).unwrap().rms_spread;
        let b = coherence_bandwidth(&freq_corr(&x, 0, 1).unwrap(), c.bandwidth);
        let alpha = alpha_factor(s, b.value).unwrap();
        let want = 2.0 * PI / (std::f64::consts::E.powi(2) - 1.0).sqrt();
        assert!((alpha / want - 1.0).abs() < 0.02, "alpha {alpha} vs {want}");
    }

    #[test]
    fn alpha_from_reported_means() {
        let cases = [(405.4e-9, 10.6e6, 0.233), (341.6e-9, 10.9e6, 0.269), (454.9e-9, 8.7e6, 0.253)];
        for (s, b, want) in cases {
            assert!((alpha_factor(s, b).unwrap() - want).abs() < 0.005);
        }
        assert!(alpha_factor(0.0, 1e6).is_err());
        assert!(alpha_factor(1e-7, 0.0).is_err());
    }

    #[test]
    fn csv_exports() {
        let rows = [FrequencyRow { position_m: 0.5, delay_spread: 100e-9, coherence_bandwidth: 2e6, saturated: false }];
        let mut buf = Vec::new();
        FrequencyRow::write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "position_m,S_tau_ns,B_coh_MHz,saturated\n0.5,100,2,0\n");
        let mut buf = Vec::new();
        write_cdf(&[2.0, 1.0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value,probability\n1,0.5\n2,1\n");
    }

    #[test]
    fn series_matches_single_calls() {
        let x = two_tap(300e-9);
        let x = CsiTensor::new(x.config().clone(), vec![0.0], x.data().to_vec()).unwrap();
        let s = freq_corr_series_with(&x, &[0], 1, Execution::Sequential).unwrap();
        assert_eq!(s[0], freq_corr(&x, 0, 1).unwrap());
        assert!(freq_corr(&x, 0, 2).is_err());
    }

    proptest! {
        #[test]
        fn spread_is_translation_invariant(p in proptest::collection::vec(0.0f64..1.0, 2..40), shift in 0.0f64..1e-6) {
            prop_assume!(p.iter().sum::<f64>() > 1e-3);
            let d = axis(p.len(), 1e-8);
            let moved: Vec<f64> = d.iter().map(|t| t + shift).collect();
            let a = delay_spread(&p, &d).unwrap().rms_spread;
            let b = delay_spread(&p, &moved).unwrap().rms_spread;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-12));
        }

        #[test]
        fn spread_scales_with_dilation(p in proptest::collection::vec(0.0f64..1.0, 2..40), a in 0.1f64..10.0) {
            prop_assume!(p.iter().sum::<f64>() > 1e-3);
            let d = axis(p.len(), 1e-8);
            let wide: Vec<f64> = d.iter().map(|t| t * a).collect();
            let s = delay_spread(&p, &d).unwrap().rms_spread;
            let w = delay_spread(&p, &wide).unwrap().rms_spread;
            prop_assert!((w - a * s).abs() <= 1e-9 * (a * s).max(1e-15));
        }

        #[test]
        fn zero_lag_dominates(seed in 0u64..1000, f in 2usize..24) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = CsiTensor::from_fn(
                MeasurementConfig { num_freq_bins: f, ..cfg(2) },
                2,
                |_, _, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ).unwrap();
            let rf = freq_corr(&x, 0, 2).unwrap();
            let r0 = rf.at(0).re;
            // Per-lag overlap normalization can exceed R_f(0) only at sparse
            // lags; the unnormalized sums obey Cauchy-Schwarz.
            for lag in -(f as isize - 1)..f as isize {
                let raw = rf.at(lag).norm() * (f - lag.unsigned_abs()) as f64;
                prop_assert!(raw <= r0 * f as f64 * (1.0 + 1e-9));
            }
        }

        #[test]
        fn two_tap_bandwidth_antitone(a in 80e-9f64..900e-9, b in 80e-9f64..900e-9) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let bl = coherence_bandwidth(&freq_corr(&two_tap(lo), 0, 1).unwrap(), 18e6).value;
            let bh = coherence_bandwidth(&freq_corr(&two_tap(hi), 0, 1).unwrap(), 18e6).value;
            prop_assert!(bh <= bl + 1e-6);
        }
    }
}
