use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use a2g_mimo::csi::{load_csi, store_csi, CsiTensor, MeasurementConfig, TrajectoryLog};
use a2g_mimo::geo::{synth_csi, Scene, SceneFile};
use a2g_mimo::sounder::{estimate_csi, SoundingConfig};
use serde::Serialize;

use crate::analyze::{analyze, write_summary, Summary};
use crate::error::CliError;
use crate::manifest::{CommandKind, RunManifest};
use crate::output::{ensure_dir, write_atomic};

pub const CSI_FILE: &str = "csi.bin";
pub const TRUTH_FILE: &str = "truth.bin";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const ESTIMATE_FILE: &str = "estimate.json";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Runs `manifest` and records it in the output directory.
pub fn execute(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.validate()?;
    let out = &manifest.output;
    ensure_dir(out)?;
    match manifest.command {
        CommandKind::Synth => synth(manifest)?,
        CommandKind::Estimate => estimate(manifest)?,
        CommandKind::Analyze => {
            let (csi, traj) = match (&manifest.inputs.csi, &manifest.inputs.trajectory) {
                (Some(c), Some(t)) => (c, t),
                _ => unreachable!("validated"),
            };
            let tensor = read_csi(csi)?;
            let log = read_log(traj)?;
            let label = csi.file_stem().and_then(|s| s.to_str()).unwrap_or("csi");
            analyze(&tensor, &log, &manifest.params, label, out)?;
        }
        CommandKind::Report => report(manifest)?,
    }
    manifest.save(out)
}

fn load_scene(path: &Path, seed: Option<u64>) -> Result<(Scene, MeasurementConfig), CliError> {
    let (mut scene, cfg) = SceneFile::load(path)?.build()?;
    if let (Some(seed), Some(noise)) = (seed, scene.noise.as_mut()) {
        noise.seed = seed;
    }
    Ok((scene, cfg))
}

fn flight(scene: &Scene, duration: Option<f64>) -> f64 {
    duration.unwrap_or_else(|| scene.trajectory.flight_time())
}

fn read_csi(path: &Path) -> Result<CsiTensor, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(load_csi(BufReader::new(file))?)
}

fn read_log(path: &Path) -> Result<TrajectoryLog, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(TrajectoryLog::read_csv(BufReader::new(file))?)
}

fn write_csi(path: &Path, tensor: &CsiTensor) -> Result<(), CliError> {
    write_atomic(path, |w| store_csi(tensor, w).map(|_| ()).map_err(CliError::from))
}

fn write_log(path: &Path, scene: &Scene, cfg: &MeasurementConfig, duration: f64) -> Result<(), CliError> {
    let log = scene.gps_log(cfg.gps_interval, duration)?;
    write_atomic(path, |w| Ok(log.write_csv(w)?))
}

fn synth(m: &RunManifest) -> Result<(), CliError> {
    let (scene, cfg) = load_scene(&m.inputs.scenes[0], m.seed)?;
    let duration = flight(&scene, m.duration);
    let tensor = synth_csi(&scene, &cfg, duration)?;
    write_csi(&m.output.join(CSI_FILE), &tensor)?;
    write_log(&m.output.join(TRAJECTORY_FILE), &scene, &cfg, duration)
}

#[derive(Serialize)]
struct EstimateReport {
    nmse_db: f64,
    sync_failures: usize,
    snapshots: usize,
}

fn estimate(m: &RunManifest) -> Result<(), CliError> {
    let (mut scene, cfg) = load_scene(&m.inputs.scenes[0], None)?;
    scene.noise = None;
    let duration = flight(&scene, m.duration);
    let truth = synth_csi(&scene, &cfg, duration)?;
    let s = m.sounding.as_ref().expect("validated");
    let sounding = SoundingConfig {
        zc_root: s.zc_root,
        zc_length: s.zc_length,
        snr_db: s.snr_db,
        seed: m.seed.unwrap_or(0),
        sync_threshold: s.sync_threshold,
        ..SoundingConfig::default()
    };
    let outcome = estimate_csi(&truth, &sounding)?;
    write_csi(&m.output.join(CSI_FILE), &outcome.estimate)?;
    write_csi(&m.output.join(TRUTH_FILE), &truth)?;
    write_log(&m.output.join(TRAJECTORY_FILE), &scene, &cfg, duration)?;
    let report = EstimateReport {
        nmse_db: outcome.nmse_db(),
        sync_failures: outcome.sync_failures,
        snapshots: truth.snapshots(),
    };
    let path = m.output.join(ESTIMATE_FILE);
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::data("cli", e))?;
    write_atomic(&path, |w| w.write_all(text.as_bytes()).map_err(|e| CliError::io(&path, e)))
}

/// One bundle per scene under `<out>/<scene stem>/`, plus the combined
/// summary table.
fn report(m: &RunManifest) -> Result<(), CliError> {
    let mut rows: Vec<Summary> = Vec::with_capacity(m.inputs.scenes.len());
    for path in &m.inputs.scenes {
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene").to_string();
        if rows.iter().any(|r| r.label == label) {
            return Err(CliError::config("cli", format!("duplicate scene name `{label}`")));
        }
        let (scene, cfg) = load_scene(path, m.seed)?;
        let duration = flight(&scene, m.duration);
        let tensor = synth_csi(&scene, &cfg, duration)?;
        let log = scene.gps_log(cfg.gps_interval, duration)?;
        rows.push(analyze(&tensor, &log, &m.params, &label, &m.output.join(&label))?);
    }
    write_atomic(&m.output.join(SUMMARY_FILE), |w| write_summary(&rows, w))
}
