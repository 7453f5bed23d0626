use std::path::{Path, PathBuf};

use a2g_mimo::geo::ElementOrder;
use a2g_mimo::spatial::{RegionMode, RHO_HIGH, RHO_LOW};
use a2g_mimo::temporal::{DEFAULT_CMD_THRESHOLD, DEFAULT_WINDOW};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Synth,
    Estimate,
    Analyze,
    Report,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default)]
    pub scenes: Vec<PathBuf>,
    pub csi: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RegionModeArg {
    #[default]
    Connected,
    Superlevel,
}

impl From<RegionModeArg> for RegionMode {
    fn from(m: RegionModeArg) -> Self {
        match m {
            RegionModeArg::Connected => RegionMode::Connected,
            RegionModeArg::Superlevel => RegionMode::Superlevel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ElementOrderArg {
    #[default]
    ColumnMajor,
    RowMajor,
}

impl From<ElementOrderArg> for ElementOrder {
    fn from(o: ElementOrderArg) -> Self {
        match o {
            ElementOrderArg::ColumnMajor => ElementOrder::ColumnMajor,
            ElementOrderArg::RowMajor => ElementOrder::RowMajor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisParams {
    pub window: usize,
    pub c_th: f64,
    /// Frequency bins `[start, end)`; all bins when absent.
    pub band: Option<[usize; 2]>,
    /// Snapshots between distance-axis references; defaults to `window`.
    pub stride: Option<usize>,
    pub angle_span: [f64; 2],
    pub angle_step: f64,
    pub clip_db: f64,
    pub rho_high: f64,
    pub rho_low: f64,
    /// Reference element `[row, col]` for the spatial map.
    pub element: [usize; 2],
    pub element_order: ElementOrderArg,
    pub region_mode: RegionModeArg,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            window: DEFAULT_WINDOW,
            c_th: DEFAULT_CMD_THRESHOLD,
            band: None,
            stride: None,
            angle_span: [40.0, 140.0],
            angle_step: 0.1,
            clip_db: 30.0,
            rho_high: RHO_HIGH,
            rho_low: RHO_LOW,
            element: [3, 3],
            element_order: ElementOrderArg::ColumnMajor,
            region_mode: RegionModeArg::Connected,
        }
    }
}

impl AnalysisParams {
    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(self.window)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::config("cli", m));
        if self.window == 0 {
            return bad("window must be >= 1".into());
        }
        if self.stride == Some(0) {
            return bad("stride must be >= 1".into());
        }
        if !(self.c_th > 0.0 && self.c_th < 1.0) {
            return bad(format!("c_th must be in (0, 1), got {}", self.c_th));
        }
        if let Some([a, b]) = self.band {
            if a >= b {
                return bad(format!("band {a}:{b} is empty"));
            }
        }
        let [lo, hi] = self.angle_span;
        if !(0.0..=180.0).contains(&lo) || !(0.0..=180.0).contains(&hi) || lo >= hi {
            return bad(format!("angle span {lo}:{hi} must be increasing within 0..180"));
        }
        if !(self.angle_step > 0.0 && self.angle_step <= hi - lo) {
            return bad(format!("angle step {} must be in (0, {}]", self.angle_step, hi - lo));
        }
        if !(self.clip_db > 0.0) {
            return bad(format!("clip must be > 0 dB, got {}", self.clip_db));
        }
        for rho in [self.rho_high, self.rho_low] {
            if !(rho > 0.0 && rho < 1.0) {
                return bad(format!("rho thresholds must be in (0, 1), got {rho}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoundingParams {
    pub snr_db: Option<f64>,
    pub zc_root: u32,
    pub zc_length: u32,
    pub sync_threshold: f64,
}

/// Everything needed to reproduce a run. Written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: CommandKind,
    pub inputs: Inputs,
    pub params: AnalysisParams,
    /// Synthesized flight time, s; the full trajectory when absent.
    pub duration: Option<f64>,
    pub sounding: Option<SoundingParams>,
    /// Noise seed override for synthesis, sounder seed for estimation.
    pub seed: Option<u64>,
    pub output: PathBuf,
}

impl RunManifest {
    pub fn new(command: CommandKind, output: PathBuf) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs: Inputs::default(),
            params: AnalysisParams::default(),
            duration: None,
            sounding: None,
            seed: None,
            output,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config("cli", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("cli", format!("{}: {e}", path.display())))
    }

    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::data("cli", e))?;
        write_atomic(&path, |w| w.write_all(text.as_bytes()).and_then(|_| w.write_all(b"\n")).map_err(|e| CliError::io(&path, e)))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        if let Some(d) = self.duration {
            if !(d > 0.0) {
                return Err(CliError::config("cli", format!("duration must be > 0 s, got {d}")));
            }
        }
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(CliError::config("cli", format!("manifest lacks {what}"))) };
        match self.command {
            CommandKind::Synth | CommandKind::Estimate => need(self.inputs.scenes.len() == 1, "exactly one scene"),
            CommandKind::Report => need(!self.inputs.scenes.is_empty(), "scenes"),
            CommandKind::Analyze => need(self.inputs.csi.is_some() && self.inputs.trajectory.is_some(), "csi and trajectory inputs"),
        }?;
        if self.command == CommandKind::Estimate {
            need(self.sounding.is_some(), "sounding parameters")?;
        }
        Ok(())
    }
}
