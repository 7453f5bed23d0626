use super::{PilotSequence, SounderError};
use crate::C64;

/// Default normalized-correlation detection threshold.
pub const DEFAULT_SYNC_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Sample index where the reference starts.
    pub offset: usize,
    /// `|c(d)| / (‖x‖·‖r_d‖)` at the detected offset, in [0, 1].
    pub peak_metric: f64,
    pub threshold: f64,
}

/// Sliding cross-correlation `c(d) = Σ_k r[d+k]·conj(x[k])`.
///
/// The offset is the argmax of `|c(d)|`; it is accepted when the
/// energy-normalized correlation there reaches `threshold`.
pub fn pss_detect(received: &[C64], reference: &PilotSequence, threshold: f64) -> Result<SyncResult, SounderError> {
    let x = &reference.samples;
    let l = x.len();
    if l == 0 || received.len() < l {
        return Err(SounderError::TooShort {
            received: received.len(),
            reference: l,
        });
    }
    let mut best = (0usize, -1.0f64, C64::default());
    for d in 0..=received.len() - l {
        let c: C64 = received[d..d + l].iter().zip(x).map(|(r, s)| r * s.conj()).sum();
        let mag = c.norm();
        if mag > best.1 {
            best = (d, mag, c);
        }
    }
    let (offset, mag, _) = best;
    let window_energy: f64 = received[offset..offset + l].iter().map(|z| z.norm_sqr()).sum();
    let denom = (reference.energy() * window_energy).sqrt();
    let peak_metric = if denom > 0.0 { (mag / denom).min(1.0) } else { 0.0 };
    if peak_metric >= threshold && denom > 0.0 {
        Ok(SyncResult { offset, peak_metric, threshold })
    } else {
        Err(SounderError::NoSync { peak_metric, threshold })
    }
}
