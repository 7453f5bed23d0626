use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{ls_estimate, pss_detect, zadoff_chu, PilotSequence, SounderError, DEFAULT_SYNC_THRESHOLD};
use crate::csi::CsiTensor;
use crate::{Execution, C64};

/// Parameters of the simulated sounding chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoundingConfig {
    pub zc_root: u32,
    pub zc_length: u32,
    /// Per-sample SNR at the receiver; `None` runs noise-free.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub sync_threshold: f64,
    /// Search margin on each side of the frame start, samples.
    pub sync_guard: usize,
}

impl Default for SoundingConfig {
    fn default() -> Self {
        SoundingConfig {
            zc_root: 25,
            zc_length: 63,
            snr_db: None,
            seed: 0,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            sync_guard: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EstimateOutcome {
    pub estimate: CsiTensor,
    /// `Σ|Ĥ − H|² / Σ|H|²`, linear.
    pub nmse: f64,
    /// Snapshots whose frame sync missed the true start or did not trigger.
    pub sync_failures: usize,
}

impl EstimateOutcome {
    pub fn nmse_db(&self) -> f64 {
        10.0 * self.nmse.log10()
    }
}

/// Pilot on each of `bins` subcarriers, the ZC sequence repeated cyclically.
pub fn pilot_symbols(pilot: &PilotSequence, bins: usize) -> Vec<C64> {
    (0..bins).map(|f| pilot.samples[f % pilot.len()]).collect()
}

pub fn nmse(estimate: &[C64], truth: &[C64]) -> f64 {
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).norm_sqr()).sum();
    let pow: f64 = truth.iter().map(|z| z.norm_sqr()).sum();
    err / pow
}

pub fn estimate_csi(truth: &CsiTensor, cfg: &SoundingConfig) -> Result<EstimateOutcome, SounderError> {
    estimate_csi_with(truth, cfg, Execution::default())
}

/// Runs every snapshot of `truth` through the sounding chain: the frame is
/// located by PSS cross-correlation in a noisy capture, the pilot passes the
/// channel, and LS division recovers `Ĥ`.
pub fn estimate_csi_with(truth: &CsiTensor, cfg: &SoundingConfig, exec: Execution) -> Result<EstimateOutcome, SounderError> {
    let pss = zadoff_chu(cfg.zc_root, cfg.zc_length)?;
    let nf = truth.bins();
    let tx = pilot_symbols(&pss, nf);
    let block = truth.antennas() * nf;

    let per_snapshot: Vec<Result<(Vec<C64>, bool), SounderError>> = exec.map_range(truth.snapshots(), |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t as u64);
        let synced = frame_sync(&pss, cfg, &mut rng);

        let h = truth.snapshot(t);
        let mut rx: Vec<C64> = h.iter().enumerate().map(|(i, v)| v * tx[i % nf]).collect();
        if let Some(snr) = cfg.snr_db {
            let power = h.iter().map(|z| z.norm_sqr()).sum::<f64>() / block as f64;
            add_awgn(&mut rx, power * 10f64.powf(-snr / 10.0), &mut rng);
        }
        Ok((ls_estimate(&rx, &tx)?, synced))
    });

    let mut data = Vec::with_capacity(truth.data().len());
    let mut sync_failures = 0;
    for r in per_snapshot {
        let (est, synced) = r?;
        data.extend(est);
        if !synced {
            sync_failures += 1;
        }
    }
    let nmse = nmse(&data, truth.data());
    let estimate = CsiTensor::new(truth.config().clone(), truth.timestamps().to_vec(), data)?;
    Ok(EstimateOutcome {
        estimate,
        nmse,
        sync_failures,
    })
}

/// Embeds the PSS at a random start inside a capture of `L + 2·guard`
/// samples and checks the detector recovers it.
fn frame_sync(pss: &PilotSequence, cfg: &SoundingConfig, rng: &mut ChaCha8Rng) -> bool {
    let l = pss.len();
    let start = rng.gen_range(0..=2 * cfg.sync_guard);
    let mut capture = vec![C64::default(); l + 2 * cfg.sync_guard];
    capture[start..start + l].copy_from_slice(&pss.samples);
    if let Some(snr) = cfg.snr_db {
        add_awgn(&mut capture, 10f64.powf(-snr / 10.0), rng);
    }
    matches!(pss_detect(&capture, pss, cfg.sync_threshold), Ok(r) if r.offset == start)
}

fn add_awgn(x: &mut [C64], variance: f64, rng: &mut ChaCha8Rng) {
    let s = (variance / 2.0).sqrt();
    for z in x.iter_mut() {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        *z += C64::new(a * s, b * s);
    }
}
