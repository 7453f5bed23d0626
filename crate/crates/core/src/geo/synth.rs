use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{resolve_paths, GeoError, PathComponent, Scene, UraGeometry};
use crate::csi::{CsiTensor, MeasurementConfig};
use crate::{Execution, C64};

/// Adds the contribution of `paths` to one `M × F` snapshot block
/// (antenna-major): `Σ_p gain_p · a_p,m · exp(−j2π f_k τ_p)`.
pub fn synth_snapshot(paths: &[PathComponent], ura: &UraGeometry, config: &MeasurementConfig, out: &mut [C64]) {
    let nf = config.num_freq_bins;
    let lambda = config.wavelength();
    let mut ramp = vec![C64::default(); nf];
    for p in paths {
        let a = ura.steering_towards(ura.direction(p.azimuth, p.elevation), lambda);
        for (k, r) in ramp.iter_mut().enumerate() {
            *r = C64::from_polar(1.0, -2.0 * PI * config.bin_frequency(k) * p.delay);
        }
        for (m, row) in out.chunks_exact_mut(nf).enumerate() {
            let c = p.gain * a[m];
            for (h, r) in row.iter_mut().zip(&ramp) {
                *h += c * r;
            }
        }
    }
}

pub fn synth_csi(scene: &Scene, config: &MeasurementConfig, duration: f64) -> Result<CsiTensor, GeoError> {
    synth_csi_with(scene, config, duration, Execution::default())
}

/// Snapshots every `csi_interval` along the trajectory for `duration`
/// seconds. Noise, when configured, is seeded per snapshot so the result is
/// independent of `exec`.
pub fn synth_csi_with(
    scene: &Scene,
    config: &MeasurementConfig,
    duration: f64,
    exec: Execution,
) -> Result<CsiTensor, GeoError> {
    scene.validate()?;
    config.validate()?;
    if scene.ura.len() != config.num_antennas {
        return Err(GeoError::Scene(format!(
            "array has {} elements but config expects {}",
            scene.ura.len(),
            config.num_antennas
        )));
    }
    let available = scene.trajectory.flight_time();
    if !(duration > 0.0) || duration > available * (1.0 + 1e-12) {
        return Err(GeoError::Duration { duration, available });
    }
    let t_count = ((duration / config.csi_interval) + 1e-9).round() as usize;
    if t_count == 0 {
        return Err(GeoError::Duration { duration, available });
    }
    let block = config.num_antennas * config.num_freq_bins;
    let lambda = config.wavelength();

    // Geometry errors surface before the parallel fill.
    for t in [0, t_count - 1] {
        resolve_paths(scene, scene.trajectory.position_at(t as f64 * config.csi_interval), lambda)?;
    }

    let mut data = vec![C64::default(); t_count * block];
    exec.for_each_chunk_mut(&mut data, block, |t, out| {
        let pos = scene.trajectory.position_at(t as f64 * config.csi_interval);
        let paths = resolve_paths(scene, pos, lambda).expect("validated geometry");
        synth_snapshot(&paths, &scene.ura, config, out);
        if let Some(noise) = scene.noise {
            add_noise(out, noise.snr_db, noise.seed, t as u64);
        }
    });
    let timestamps = (0..t_count).map(|t| t as f64 * config.csi_interval).collect();
    Ok(CsiTensor::new(config.clone(), timestamps, data)?)
}

/// Circular Gaussian noise at `snr_db` below the block's mean power.
pub(crate) fn add_noise(block: &mut [C64], snr_db: f64, seed: u64, stream: u64) {
    let power = block.iter().map(|z| z.norm_sqr()).sum::<f64>() / block.len() as f64;
    let sigma = (power * 10f64.powf(-snr_db / 10.0) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    for z in block.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += C64::new(re * sigma, im * sigma);
    }
}
