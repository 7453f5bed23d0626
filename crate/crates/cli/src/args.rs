use std::path::PathBuf;

use a2g_mimo::sounder::DEFAULT_SYNC_THRESHOLD;
use a2g_mimo::spatial::{RHO_HIGH, RHO_LOW};
use a2g_mimo::temporal::{DEFAULT_CMD_THRESHOLD, DEFAULT_WINDOW};
use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::manifest::{AnalysisParams, CommandKind, ElementOrderArg, RegionModeArg, RunManifest, SoundingParams};
use crate::output::{resolve_output, OUTPUT_ROOT_ENV};

#[derive(Debug, Parser)]
#[command(name = "a2gmimo", version, about = "Space-time-frequency stationarity analysis of air-to-ground MIMO channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize CSI and a GPS log from a scene file.
    Synth(SynthArgs),
    /// Run the simulated sounder on a scene and write the estimated CSI.
    Estimate(EstimateArgs),
    /// Analyze a CSI capture and its trajectory log.
    Analyze(AnalyzeArgs),
    /// Synthesize and analyze a batch of scenes into one summary table.
    Report(ReportArgs),
    /// Re-run a saved manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory; defaults to `<output root>/<subcommand>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = OUTPUT_ROOT_ENV)]
    pub output_root: Option<PathBuf>,
}

impl OutputArgs {
    fn resolve(self, name: &str) -> PathBuf {
        resolve_output(self.out, self.output_root, name)
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Averaging window W, snapshots.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// CMD threshold.
    #[arg(long, default_value_t = DEFAULT_CMD_THRESHOLD)]
    pub c_th: f64,
    /// Frequency bins `start:end` (end exclusive) entering the correlation matrices.
    #[arg(long, value_parser = parse_band)]
    pub band: Option<[usize; 2]>,
    /// Snapshots between distance references; defaults to the window.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Angle span `lo:hi`, degrees.
    #[arg(long, value_parser = parse_span, default_value = "40:140")]
    pub angle_span: [f64; 2],
    /// Angle grid step, degrees.
    #[arg(long, default_value_t = 0.1)]
    pub angle_step: f64,
    /// Taps this many dB below the peak are dropped before delay statistics.
    #[arg(long, default_value_t = 30.0)]
    pub clip_db: f64,
    #[arg(long, default_value_t = RHO_HIGH)]
    pub rho_high: f64,
    #[arg(long, default_value_t = RHO_LOW)]
    pub rho_low: f64,
    /// Reference element `row,col` of the spatial map.
    #[arg(long, value_parser = parse_element, default_value = "3,3")]
    pub element: [usize; 2],
    #[arg(long, value_enum, default_value_t = ElementOrderArg::ColumnMajor)]
    pub element_order: ElementOrderArg,
    #[arg(long, value_enum, default_value_t = RegionModeArg::Connected)]
    pub region_mode: RegionModeArg,
}

impl From<ParamArgs> for AnalysisParams {
    fn from(a: ParamArgs) -> Self {
        AnalysisParams {
            window: a.window,
            c_th: a.c_th,
            band: a.band,
            stride: a.stride,
            angle_span: a.angle_span,
            angle_step: a.angle_step,
            clip_db: a.clip_db,
            rho_high: a.rho_high,
            rho_low: a.rho_low,
            element: a.element,
            element_order: a.element_order,
            region_mode: a.region_mode,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene TOML file.
    pub scene: PathBuf,
    /// Flight time to synthesize, s; the whole trajectory by default.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Overrides the scene's noise seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub scene: PathBuf,
    #[arg(long)]
    pub duration: Option<f64>,
    /// Receiver SNR, dB; noise-free when omitted.
    #[arg(long)]
    pub snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 25)]
    pub zc_root: u32,
    #[arg(long, default_value_t = 63)]
    pub zc_length: u32,
    #[arg(long, default_value_t = DEFAULT_SYNC_THRESHOLD)]
    pub sync_threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSI capture.
    #[arg(long)]
    pub csi: PathBuf,
    /// GPS log, `timestamp_s,x_m,y_m,z_m`.
    #[arg(long)]
    pub trajectory: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Scene TOML files, one summary row each.
    #[arg(required = true)]
    pub scenes: Vec<PathBuf>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair<T: std::str::FromStr>(s: &str, sep: char) -> Result<[T; 2], String> {
    let (a, b) = s.split_once(sep).ok_or_else(|| format!("expected `a{sep}b`, got `{s}`"))?;
    let p = |v: &str| v.trim().parse::<T>().map_err(|_| format!("bad number `{v}`"));
    Ok([p(a)?, p(b)?])
}

fn parse_band(s: &str) -> Result<[usize; 2], String> {
    parse_pair(s, ':')
}

fn parse_span(s: &str) -> Result<[f64; 2], String> {
    parse_pair(s, ':')
}

fn parse_element(s: &str) -> Result<[usize; 2], String> {
    parse_pair(s, ',')
}

impl Command {
    /// The manifest this invocation describes. `Replay` loads it from disk.
    pub fn into_manifest(self) -> Result<RunManifest, CliError> {
        let m = match self {
            Command::Synth(a) => {
                let mut m = RunManifest::new(CommandKind::Synth, a.output.resolve("synth"));
                m.inputs.scenes = vec![a.scene];
                m.duration = a.duration;
                m.seed = a.seed;
                m
            }
            Command::Estimate(a) => {
                let mut m = RunManifest::new(CommandKind::Estimate, a.output.resolve("estimate"));
                m.inputs.scenes = vec![a.scene];
                m.duration = a.duration;
                m.seed = Some(a.seed);
                m.sounding = Some(SoundingParams {
                    snr_db: a.snr_db,
                    zc_root: a.zc_root,
                    zc_length: a.zc_length,
                    sync_threshold: a.sync_threshold,
                });
                m
            }
            Command::Analyze(a) => {
                let mut m = RunManifest::new(CommandKind::Analyze, a.output.resolve("analyze"));
                m.inputs.csi = Some(a.csi);
                m.inputs.trajectory = Some(a.trajectory);
                m.params = a.params.into();
                m
            }
            Command::Report(a) => {
                let mut m = RunManifest::new(CommandKind::Report, a.output.resolve("report"));
                m.inputs.scenes = a.scenes;
                m.duration = a.duration;
                m.seed = a.seed;
                m.params = a.params.into();
                m
            }
            Command::Replay(a) => {
                let mut m = RunManifest::load(&a.manifest)?;
                if let Some(out) = a.out {
                    m.output = out;
                }
                m
            }
        };
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_analysis_flags() {
        let cli = Cli::try_parse_from([
            "a2gmimo", "analyze", "--csi", "c.bin", "--trajectory", "t.csv", "--window", "10", "--band", "5:95",
            "--angle-span", "60:120", "--element", "0,7", "--out", "o",
        ])
        .unwrap();
        let m = cli.command.into_manifest().unwrap();
        assert_eq!(m.params.window, 10);
        assert_eq!(m.params.band, Some([5, 95]));
        assert_eq!(m.params.angle_span, [60.0, 120.0]);
        assert_eq!(m.params.element, [0, 7]);
        assert_eq!(m.output, PathBuf::from("o"));
    }

    #[test]
    fn malformed_pairs_are_usage_errors() {
        let e = Cli::try_parse_from(["a2gmimo", "analyze", "--csi", "c", "--trajectory", "t", "--band", "5-9"]);
        assert_eq!(e.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn out_of_range_values_are_config_errors() {
        let cli = Cli::try_parse_from(["a2gmimo", "analyze", "--csi", "c", "--trajectory", "t", "--c-th", "1.5"]).unwrap();
        assert_eq!(cli.command.into_manifest().unwrap_err().exit_code(), 3);
    }
}
