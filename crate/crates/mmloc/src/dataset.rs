//! Synthetic measurement campaigns driven by the ray tracer, and positioning
//! error evaluation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use mmloc_core::channel::{CiPathLossModel, FrequencyBand};
use mmloc_core::geom::{EnvironmentMap, Point2};
use mmloc_core::locate::AnchorNode;
use mmloc_core::raytracer::{trace, TraceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::observations::{wrap_tau, AnchorObservation, MeasurementRecord};

/// Default RSSI noise (dB), a typical indoor shadow-fading spread.
pub const DEFAULT_RSSI_SIGMA_DB: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub env: EnvironmentMap,
    pub anchors: Vec<AnchorNode>,
    pub rx_points: Vec<Point2>,
    pub band: FrequencyBand,
    pub model: CiPathLossModel,
    /// AoA sweep step (rad); `None` records the exact arrival angle.
    pub aoa_step: Option<f64>,
    pub rssi_noise_sigma: f64,
    pub seed: u64,
    /// Pairs farther apart than this (m) are not measured.
    pub comm_range: Option<f64>,
    pub trace: TraceConfig,
    /// Combined tx + rx antenna gain added to every RSSI (dB).
    pub antenna_gains_db: f64,
}

impl CampaignConfig {
    /// Exact AoA, the default noise level, seed 0 and the default tracer.
    pub fn new(
        env: EnvironmentMap,
        anchors: Vec<AnchorNode>,
        rx_points: Vec<Point2>,
        band: FrequencyBand,
        model: CiPathLossModel,
    ) -> Self {
        Self {
            env,
            anchors,
            rx_points,
            band,
            model,
            aoa_step: None,
            rssi_noise_sigma: DEFAULT_RSSI_SIGMA_DB,
            seed: 0,
            comm_range: None,
            trace: TraceConfig::default(),
            antenna_gains_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Campaign(m));
        if let Some(step) = self.aoa_step {
            if !(step > 0.0 && step.is_finite()) {
                return bad(format!("aoa_step must be positive, got {step}"));
            }
        }
        if !(self.rssi_noise_sigma >= 0.0 && self.rssi_noise_sigma.is_finite()) {
            return bad(format!("rssi_noise_sigma must be non-negative, got {}", self.rssi_noise_sigma));
        }
        if let Some(r) = self.comm_range {
            if !(r > 0.0) {
                return bad(format!("comm_range must be positive, got {r}"));
            }
        }
        for (i, a) in self.anchors.iter().enumerate() {
            if self.anchors[..i].iter().any(|b| b.id == a.id) {
                return bad(format!("duplicate anchor `{}`", a.id));
            }
            if !self.env.contains(a.position) {
                return bad(format!("anchor `{}` is outside the map", a.id));
            }
        }
        for (i, p) in self.rx_points.iter().enumerate() {
            if !self.env.contains(*p) {
                return bad(format!("rx `{}` at ({}, {}) is outside the map", rx_id(i, self.rx_points.len()), p.x, p.y));
            }
        }
        Ok(())
    }
}

/// Zero-padded receiver id so that lexical order matches index order.
pub fn rx_id(index: usize, count: usize) -> String {
    let width = count.to_string().len().max(2);
    format!("rx{:0width$}", index + 1)
}

fn snap(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

/// Runs the tracer for every (rx, anchor) pair in that order.
///
/// RSSI is the total received power plus antenna gains plus Gaussian noise,
/// AoA and ToA come from the strongest path and are snapped to the AoA step
/// and to `1/B`. One normal draw is consumed per traced pair whether or not
/// the pair is received, so the noise stream does not depend on the walls.
pub fn generate_campaign(cfg: &CampaignConfig) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bandwidth = cfg.band.bandwidth_hz();
    let mut records = Vec::with_capacity(cfg.rx_points.len());
    for (i, &rx) in cfg.rx_points.iter().enumerate() {
        let id = rx_id(i, cfg.rx_points.len());
        let mut observations = Vec::new();
        for anchor in &cfg.anchors {
            if cfg.comm_range.is_some_and(|r| anchor.position.distance(rx) > r) {
                continue;
            }
            let pred = trace(&cfg.env, anchor.position, rx, anchor.tx_power_dbm, &cfg.band, &cfg.model, &cfg.trace)
                .map_err(|source| Error::Trace { rx: id.clone(), anchor: anchor.id.clone(), source })?;
            let z: f64 = rng.sample(StandardNormal);
            let Some(power) = pred.total_rx_power_dbm else {
                continue;
            };
            observations.push(AnchorObservation {
                anchor_id: anchor.id.clone(),
                rssi_dbm: Some(power + cfg.antenna_gains_db + cfg.rssi_noise_sigma * z),
                aoa: pred.strongest_aoa.map(|a| match cfg.aoa_step {
                    Some(step) => wrap_tau(snap(a, step)),
                    None => a,
                }),
                toa: pred.strongest_toa.map(|t| snap(t * bandwidth, 1.0) / bandwidth),
            });
        }
        records.push(MeasurementRecord { rx_id: id, true_position: Some(rx), observations });
    }
    Ok(records)
}

/// `n` receiver positions drawn uniformly at least `margin` meters inside
/// the map, from a stream independent of the noise stream of `seed`.
pub fn random_rx_points(env: &EnvironmentMap, n: usize, margin: f64, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let m = margin.clamp(0.0, 0.5 * env.width().min(env.height()));
    (0..n)
        .map(|_| Point2::new(rng.random_range(m..=env.width() - m), rng.random_range(m..=env.height() - m)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RxError {
    pub rx_id: String,
    pub error_m: f64,
    pub outlier: bool,
}

/// Positioning errors with aggregates over all receivers and over the
/// receivers not flagged as outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_rx: Vec<RxError>,
    pub mean_m: f64,
    pub min_m: f64,
    pub max_m: f64,
    pub outliers: Vec<String>,
    pub inlier_mean_m: f64,
    pub inlier_min_m: f64,
    pub inlier_max_m: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Errors above `Q3 + 3·IQR` are outliers.
pub fn outlier_fence(errors: &[f64]) -> f64 {
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q1, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
    q3 + 3.0 * (q3 - q1)
}

/// (mean, min, max); the sum runs over sorted values so the result does not
/// depend on receiver order.
fn aggregates(errors: &[f64]) -> (f64, f64, f64) {
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    (mean, sorted[0], sorted[sorted.len() - 1])
}

pub fn evaluate(estimates: &[(String, Point2)], truths: &BTreeMap<String, Point2>) -> Result<EvaluationReport> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("estimate list".into()));
    }
    let mut per_rx = Vec::with_capacity(estimates.len());
    for (i, (id, est)) in estimates.iter().enumerate() {
        if estimates[..i].iter().any(|(other, _)| other == id) {
            return Err(Error::Campaign(format!("rx `{id}` has more than one estimate")));
        }
        let truth = truths.get(id).ok_or_else(|| Error::MissingTruth(id.clone()))?;
        per_rx.push(RxError { rx_id: id.clone(), error_m: est.distance(*truth), outlier: false });
    }
    let errors: Vec<f64> = per_rx.iter().map(|r| r.error_m).collect();
    let fence = outlier_fence(&errors);
    for r in &mut per_rx {
        r.outlier = r.error_m > fence;
    }
    let inliers: Vec<f64> = per_rx.iter().filter(|r| !r.outlier).map(|r| r.error_m).collect();
    let (mean_m, min_m, max_m) = aggregates(&errors);
    let (inlier_mean_m, inlier_min_m, inlier_max_m) = aggregates(&inliers);
    Ok(EvaluationReport {
        outliers: per_rx.iter().filter(|r| r.outlier).map(|r| r.rx_id.clone()).collect(),
        per_rx,
        mean_m,
        min_m,
        max_m,
        inlier_mean_m,
        inlier_min_m,
        inlier_max_m,
    })
}

pub fn write_report<W: Write>(mut writer: W, report: &EvaluationReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, report)?;
    writeln!(writer).map_err(serde_json::Error::io)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<EvaluationReport> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}
