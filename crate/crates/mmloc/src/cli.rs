//! `mmloc` subcommands. Units on the command line: meters, GHz for `--freq`,
//! MHz for `--bw`, degrees for angles.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};
use mmloc_core::channel::{CiPathLossModel, FrequencyBand};
use mmloc_core::geom::Point2;
use mmloc_core::locate::{FingerprintMetric, GridSpec, Method};
use mmloc_core::raytracer::{trace, TraceConfig};

use crate::dataset::{self, CampaignConfig};
use crate::formats;
use crate::localize::{self, LocalizeOptions};
use crate::map::load_map;
use crate::observations::{load_observations, write_observations};
use crate::plot;

#[derive(Debug, Parser)]
#[command(name = "mmloc", version, about = "Millimeter-wave channel prediction and positioning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the channel between two points and write the prediction JSON and PDP CSV.
    Trace(TraceArgs),
    /// Generate a synthetic observation campaign through the ray tracer.
    Synth(SynthArgs),
    /// Estimate every receiver's position from an observation file.
    Localize(LocalizeArgs),
    /// Compare estimates against ground truth and write an error report.
    Eval(EvalArgs),
    /// Render a PDP CSV or an error report as SVG.
    Plot(PlotArgs),
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().ok().filter(|f| f.is_finite());
    match (parse(x), parse(y)) {
        (Some(x), Some(y)) => Ok(Point2::new(x, y)),
        _ => Err(format!("expected two numbers `x,y`, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct RadioArgs {
    /// Carrier frequency (GHz).
    #[arg(long, default_value_t = 28.0)]
    pub freq: f64,
    /// Bandwidth (MHz).
    #[arg(long, default_value_t = 800.0)]
    pub bw: f64,
    /// Rays launched from the transmitter.
    #[arg(long, default_value_t = 100)]
    pub rays: usize,
    /// Maximum reflections plus transmissions per path.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Path-loss exponent of the CI model.
    #[arg(long, default_value_t = CiPathLossModel::INDOOR_LOS_PLE)]
    pub ple: f64,
}

impl RadioArgs {
    fn band(&self) -> anyhow::Result<FrequencyBand> {
        Ok(FrequencyBand::new(self.freq * 1e9, self.bw * 1e6)?)
    }

    fn model(&self) -> anyhow::Result<CiPathLossModel> {
        Ok(CiPathLossModel::new(self.ple, self.freq * 1e9)?)
    }

    fn trace_config(&self) -> TraceConfig {
        TraceConfig { n_rays: self.rays, max_interactions: self.depth, ..TraceConfig::default() }
    }
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Floor-plan JSON.
    #[arg(long)]
    pub map: PathBuf,
    /// Transmitter position `x,y` (m).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub tx: Point2,
    /// Receiver position `x,y` (m).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub rx: Point2,
    /// Transmit power (dBm).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tx_power: f64,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// Prediction JSON output.
    #[arg(long, default_value = "prediction.json")]
    pub out: PathBuf,
    /// PDP CSV output.
    #[arg(long, default_value = "pdp.csv")]
    pub pdp: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("receivers").required(true).multiple(true).args(["rx", "random"])))]
pub struct SynthArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Anchor CSV (`anchor_id,x_m,y_m,tx_power_dbm,carrier_hz`).
    #[arg(long)]
    pub anchors: PathBuf,
    /// Receiver position `x,y` (m); repeatable.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub rx: Vec<Point2>,
    /// Additional receivers drawn uniformly inside the map.
    #[arg(long)]
    pub random: Option<usize>,
    /// Keep random receivers this far from the walls of the map (m).
    #[arg(long, default_value_t = 0.5)]
    pub margin: f64,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// AoA sweep step (degrees); exact angles when omitted.
    #[arg(long)]
    pub aoa_step: Option<f64>,
    /// RSSI noise standard deviation (dB).
    #[arg(long, default_value_t = dataset::DEFAULT_RSSI_SIGMA_DB)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip (rx, anchor) pairs farther apart than this (m).
    #[arg(long)]
    pub range: Option<f64>,
    /// Combined antenna gain added to every RSSI (dB).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gains: f64,
    /// Observation CSV output.
    #[arg(long, default_value = "observations.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long, value_parser = ["aoa", "fusion", "tdoa", "rank", "fingerprint"])]
    pub method: String,
    #[arg(long)]
    pub anchors: PathBuf,
    /// Observation CSV.
    #[arg(long)]
    pub obs: PathBuf,
    /// Rank-grid cell size (m).
    #[arg(long, default_value_t = 20.0)]
    pub grid: f64,
    /// Rank-grid communication range (m).
    #[arg(long, default_value_t = 200.0)]
    pub range: f64,
    /// Path-loss exponent for fusion.
    #[arg(long, default_value_t = CiPathLossModel::INDOOR_LOS_PLE)]
    pub ple: f64,
    /// Combined antenna gain for fusion (dB).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gains: f64,
    /// Surveyed observation CSV with ground truth (fingerprint).
    #[arg(long)]
    pub survey: Option<PathBuf>,
    /// Half-power beamwidth for the fingerprint AoA scale (degrees).
    #[arg(long, default_value_t = 15.0)]
    pub hpbw: f64,
    /// Bandwidth for the fingerprint ToA scale (MHz).
    #[arg(long, default_value_t = 800.0)]
    pub bw: f64,
    /// Estimates CSV output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Estimates CSV from `localize`.
    #[arg(long)]
    pub estimates: PathBuf,
    /// Observation CSV carrying `true_x_m`, `true_y_m`.
    #[arg(long)]
    pub obs: PathBuf,
    /// Report JSON output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["pdp", "errors"])))]
pub struct PlotArgs {
    /// PDP CSV (`delay_ns,power_dbm`).
    #[arg(long)]
    pub pdp: Option<PathBuf>,
    /// Report JSON from `eval`.
    #[arg(long)]
    pub errors: Option<PathBuf>,
    /// SVG output.
    #[arg(long)]
    pub out: PathBuf,
}

/// Writes through a temporary sibling so `path` is either complete or untouched.
fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write {}", path.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => Ok(std::io::stdout().lock().write_all(bytes)?),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Trace(a) => run_trace(a),
        Command::Synth(a) => run_synth(a),
        Command::Localize(a) => run_localize(a),
        Command::Eval(a) => run_eval(a),
        Command::Plot(a) => run_plot(a),
    }
}

fn run_trace(a: TraceArgs) -> anyhow::Result<()> {
    let env = load_map(&a.map)?;
    let band = a.radio.band()?;
    let pred = trace(&env, a.tx, a.rx, a.tx_power, &band, &a.radio.model()?, &a.radio.trace_config())?;
    let mut json = serde_json::to_vec_pretty(&pred)?;
    json.push(b'\n');
    let mut csv = Vec::new();
    formats::write_pdp(&mut csv, pred.pdp.as_ref())?;
    write_file(&a.out, &json)?;
    write_file(&a.pdp, &csv)?;
    println!("{} paths -> {}, {}", pred.paths.len(), a.out.display(), a.pdp.display());
    Ok(())
}

fn run_synth(a: SynthArgs) -> anyhow::Result<()> {
    let env = load_map(&a.map)?;
    let anchors = formats::load_anchors(&a.anchors)?;
    if anchors.is_empty() {
        bail!("{} lists no anchors", a.anchors.display());
    }
    let mut rx_points = a.rx.clone();
    if let Some(n) = a.random {
        rx_points.extend(dataset::random_rx_points(&env, n, a.margin, a.seed));
    }
    let mut cfg = CampaignConfig::new(env, anchors, rx_points, a.radio.band()?, a.radio.model()?);
    cfg.aoa_step = a.aoa_step.map(f64::to_radians);
    cfg.rssi_noise_sigma = a.sigma;
    cfg.seed = a.seed;
    cfg.comm_range = a.range;
    cfg.trace = a.radio.trace_config();
    cfg.antenna_gains_db = a.gains;
    let records = dataset::generate_campaign(&cfg)?;
    let mut buf = Vec::new();
    write_observations(&mut buf, &records)?;
    write_file(&a.out, &buf)?;
    println!("{} receivers -> {}", records.len(), a.out.display());
    Ok(())
}

fn run_localize(a: LocalizeArgs) -> anyhow::Result<()> {
    let method: Method = a.method.parse().map_err(anyhow::Error::msg)?;
    let anchors = formats::load_anchors(&a.anchors)?;
    let set = load_observations(&a.obs, Some(&anchors))?;
    let mut opts = LocalizeOptions::new(method);
    opts.grid = GridSpec { cell_size: a.grid, comm_range: a.range };
    opts.ple = a.ple;
    opts.antenna_gains_db = a.gains;
    opts.metric = FingerprintMetric::new(a.hpbw.to_radians(), a.bw * 1e6);
    if method == Method::Fingerprint {
        let Some(survey) = &a.survey else {
            bail!("--method fingerprint needs --survey");
        };
        opts.survey = localize::survey_records(&load_observations(survey, Some(&anchors))?)?;
    }
    let rows = localize::localize_all(&set, &anchors, &opts)?;
    let mut buf = Vec::new();
    formats::write_estimates(&mut buf, &rows)?;
    emit(a.out.as_deref(), &buf)
}

fn run_eval(a: EvalArgs) -> anyhow::Result<()> {
    let rows = formats::load_estimates(&a.estimates)?;
    let set = load_observations(&a.obs, None)?;
    let truths: BTreeMap<String, Point2> =
        set.records.iter().filter_map(|r| r.true_position.map(|p| (r.rx_id.clone(), p))).collect();
    let estimates: Vec<(String, Point2)> = rows.iter().map(|r| (r.rx_id.clone(), r.point())).collect();
    let report = dataset::evaluate(&estimates, &truths)?;
    let mut buf = Vec::new();
    dataset::write_report(&mut buf, &report)?;
    emit(a.out.as_deref(), &buf)
}

fn run_plot(a: PlotArgs) -> anyhow::Result<()> {
    let svg = match (&a.pdp, &a.errors) {
        (Some(p), _) => plot::pdp_svg(&formats::load_pdp(p)?)?,
        (None, Some(r)) => plot::errors_svg(&dataset::load_report(r)?)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    write_file(&a.out, svg.as_bytes())
}
