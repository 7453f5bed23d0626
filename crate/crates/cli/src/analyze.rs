//! Report bundle for one CSI capture: every table of the stationarity
//! analysis as plot-ready CSV, plus a one-row summary.

use std::io::Write;
use std::path::Path;

use a2g_mimo::csi::{align_trajectory, CsiTensor, TrajectoryLog};
use a2g_mimo::frequency::{
    alpha_factor, coherence_bandwidth, delay_stats_series, freq_corr_series, write_cdf, FrequencyRow,
};
use a2g_mimo::pdp::{averaged_pdp_from_csi, PowerMode};
use a2g_mimo::spatial::{corr_region, element_map, spatial_corr};
use a2g_mimo::stats::{mean_std, to_db};
use a2g_mimo::temporal::{
    angle_to_bs, antenna_corr, cmd_map, stationarity_report, stationary_region, CmdMap, CmdMapParams, MapAxis,
    StationarityRow, TemporalError,
};
use serde::Serialize;

use crate::error::CliError;
use crate::manifest::AnalysisParams;
use crate::output::{ensure_dir, write_atomic};

/// One row of `summary.csv`, shaped after the usual per-trajectory
/// statistics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub label: String,
    pub height_m: f64,
    pub references: usize,
    #[serde(rename = "SD_mean_m")]
    pub sd_mean: f64,
    #[serde(rename = "SD_std_m")]
    pub sd_std: f64,
    #[serde(rename = "SA_mean_deg")]
    pub sa_mean: f64,
    #[serde(rename = "SA_std_deg")]
    pub sa_std: f64,
    #[serde(rename = "S_tau_mean_ns")]
    pub s_tau_mean: f64,
    #[serde(rename = "S_tau_std_ns")]
    pub s_tau_std: f64,
    #[serde(rename = "B_coh_mean_MHz")]
    pub b_coh_mean: f64,
    #[serde(rename = "B_coh_std_MHz")]
    pub b_coh_std: f64,
    pub saturated_fraction: f64,
    pub alpha: f64,
    pub peak_power_db: f64,
    pub angle_lo_deg: f64,
    pub angle_hi_deg: f64,
    pub rho_high_count: usize,
    pub rho_low_count: usize,
}

pub fn write_summary(rows: &[Summary], sink: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::data("cli", e))?;
    }
    w.flush().map_err(|e| CliError::data("cli", e))
}

fn stats(values: &[f64]) -> (f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    mean_std(&finite).unwrap_or((f64::NAN, f64::NAN))
}

/// Angle-axis map, narrowing the span to the angles the flight covers.
fn angle_map(tensor: &CsiTensor, positions: &[[f64; 3]], mp: &CmdMapParams) -> Result<CmdMap, CliError> {
    match cmd_map(tensor, positions, MapAxis::Angle, mp) {
        Err(TemporalError::Span { lo, hi, min, max }) => {
            let clipped = (lo.max(min), hi.min(max));
            if !(clipped.1 > clipped.0) {
                return Err(CliError::config(
                    "temporal",
                    format!("angle span {lo}..{hi} deg does not overlap the flight ({min:.3}..{max:.3} deg)"),
                ));
            }
            let step = mp.angle_step.min(clipped.1 - clipped.0);
            let mp = CmdMapParams { angle_span: clipped, angle_step: step, ..mp.clone() };
            Ok(cmd_map(tensor, positions, MapAxis::Angle, &mp)?)
        }
        other => Ok(other?),
    }
}

fn emit(dir: &Path, name: &str, fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    write_atomic(&dir.join(name), fill)
}

/// Runs every analysis on `tensor` and writes the bundle into `out`.
pub fn analyze(
    tensor: &CsiTensor,
    log: &TrajectoryLog,
    params: &AnalysisParams,
    label: &str,
    out: &Path,
) -> Result<Summary, CliError> {
    params.validate()?;
    ensure_dir(out)?;
    let cfg = tensor.config();
    let positions = align_trajectory(log, tensor)?;
    let w = params.window;
    let band = params.band.map(|[a, b]| a..b);
    let mp = CmdMapParams {
        window: w,
        band: band.clone(),
        stride: params.stride(),
        angle_span: (params.angle_span[0], params.angle_span[1]),
        angle_step: params.angle_step,
        bs_position: cfg.bs_position,
    };

    // Temporal.
    let dist = cmd_map(tensor, &positions, MapAxis::Distance, &mp)?;
    let angle = angle_map(tensor, &positions, &mp)?;
    emit(out, "cmd_distance.csv", |s| Ok(dist.write_csv(s)?))?;
    emit(out, "cmd_angle.csv", |s| Ok(angle.write_csv(s)?))?;
    let sd = stationary_region(&dist, params.c_th, cfg.speed)?;
    let sa = stationary_region(&angle, params.c_th, cfg.speed)?;
    let first = positions[0];
    let last = positions[positions.len() - 1];
    let dir = [last[0] - first[0], last[1] - first[1], last[2] - first[2]];
    let ref_angles = dist
        .snapshots
        .iter()
        .map(|&k| angle_to_bs(positions[k], cfg.bs_position, dir))
        .collect::<Result<Vec<f64>, _>>()?;
    let step = angle.positions.get(1).map_or(params.angle_step, |p| p - angle.positions[0]);
    let rows = stationarity_report(&sd, &ref_angles, &sa, step);
    emit(out, "stationarity.csv", |s| Ok(StationarityRow::write_csv(&rows, s)?))?;

    // Delay domain, at the distance references.
    let refs = &dist.snapshots;
    let pdp = averaged_pdp_from_csi(tensor, w)?;
    let (shifted, _) = pdp.rereferenced();
    let at_refs = shifted.select(refs);
    emit(out, "pdp.csv", |s| Ok(at_refs.write_csv(s)?))?;
    emit(out, "pdp_db.csv", |s| Ok(at_refs.write_csv_db(s)?))?;
    let power_lin = at_refs.received_power(PowerMode::Total, false)?;
    let power_db = at_refs.received_power(PowerMode::Total, true)?;
    emit(out, "power.csv", |s| {
        let mut t = csv::Writer::from_writer(s);
        let wrap = |e: csv::Error| CliError::data("cli", e);
        t.write_record(["position_m", "power_db"]).map_err(wrap)?;
        for (p, v) in dist.positions.iter().zip(&power_db) {
            t.write_record([format!("{p}"), format!("{v}")]).map_err(wrap)?;
        }
        t.flush().map_err(|e| CliError::data("cli", e))
    })?;

    // Frequency domain.
    let delay = delay_stats_series(&shifted, refs, params.clip_db)?;
    let rf = freq_corr_series(tensor, refs, w)?;
    let coh: Vec<_> = rf.iter().map(|r| coherence_bandwidth(r, cfg.bandwidth)).collect();
    let freq_rows: Vec<FrequencyRow> = dist
        .positions
        .iter()
        .zip(delay.iter().zip(&coh))
        .map(|(&p, (d, c))| FrequencyRow {
            position_m: p,
            delay_spread: d.rms_spread,
            coherence_bandwidth: c.value,
            saturated: c.saturated,
        })
        .collect();
    emit(out, "frequency.csv", |s| Ok(FrequencyRow::write_csv(&freq_rows, s)?))?;
    let s_tau_ns: Vec<f64> = delay.iter().map(|d| d.rms_spread * 1e9).collect();
    let b_coh_mhz: Vec<f64> = coh.iter().map(|c| c.value * 1e-6).collect();
    let sd_m: Vec<f64> = sd.iter().map(|r| r.extent).collect();
    let sa_deg: Vec<f64> = sa.iter().map(|r| r.extent).collect();
    emit(out, "cdf_sd.csv", |s| Ok(write_cdf(&sd_m, s)?))?;
    emit(out, "cdf_sa.csv", |s| Ok(write_cdf(&sa_deg, s)?))?;
    emit(out, "cdf_s_tau.csv", |s| Ok(write_cdf(&s_tau_ns, s)?))?;
    emit(out, "cdf_b_coh.csv", |s| Ok(write_cdf(&b_coh_mhz, s)?))?;
    let (s_tau_mean, s_tau_std) = stats(&s_tau_ns);
    let (b_coh_mean, b_coh_std) = stats(&b_coh_mhz);
    let alpha = alpha_factor(s_tau_mean * 1e-9, b_coh_mean * 1e6).unwrap_or(f64::NAN);

    // Spatial, at the reference closest to boresight.
    let centre = (0..refs.len())
        .min_by(|&a, &b| (ref_angles[a] - 90.0).abs().total_cmp(&(ref_angles[b] - 90.0).abs()))
        .unwrap_or(0);
    let ra = antenna_corr(tensor, refs[centre], w, band.unwrap_or(0..tensor.bins()))?;
    let corr = spatial_corr(&ra, cfg.array_rows, cfg.array_cols, params.element_order.into())?;
    let map = element_map(&corr, (params.element[0], params.element[1]))?;
    let high = corr_region(&map, params.rho_high, params.region_mode.into());
    let low = corr_region(&map, params.rho_low, params.region_mode.into());
    emit(out, "spatial_rho.csv", |s| Ok(corr.write_csv(s)?))?;
    emit(out, "spatial_map.csv", |s| Ok(map.write_csv(s)?))?;
    emit(out, "region_high.csv", |s| Ok(high.write_csv(map.cols, s)?))?;
    emit(out, "region_low.csv", |s| Ok(low.write_csv(map.cols, s)?))?;

    let (sd_mean, sd_std) = stats(&sd_m);
    let (sa_mean, sa_std) = stats(&sa_deg);
    let summary = Summary {
        label: label.to_string(),
        height_m: positions.iter().map(|p| p[2]).sum::<f64>() / positions.len() as f64,
        references: refs.len(),
        sd_mean,
        sd_std,
        sa_mean,
        sa_std,
        s_tau_mean,
        s_tau_std,
        b_coh_mean,
        b_coh_std,
        saturated_fraction: coh.iter().filter(|c| c.saturated).count() as f64 / coh.len() as f64,
        alpha,
        peak_power_db: to_db(power_lin.iter().copied().fold(0.0, f64::max)),
        angle_lo_deg: angle.positions.first().copied().unwrap_or(f64::NAN),
        angle_hi_deg: angle.positions.last().copied().unwrap_or(f64::NAN),
        rho_high_count: high.count,
        rho_low_count: low.count,
    };
    emit(out, "summary.csv", |s| write_summary(std::slice::from_ref(&summary), s))?;
    Ok(summary)
}
