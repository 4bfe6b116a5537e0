//! Position estimators.
//!
//! | method | inputs | module |
//! |---|---|---|
//! | TDoA | range differences between anchor pairs | [`tdoa`] |
//! | AoA least squares | bearings to ≥ 2 anchors | [`aoa`] |
//! | AoA + path loss | bearing and RSSI from one LOS anchor | [`fusion`] |
//! | RSSI rank grid | ordering of anchors by RSSI | [`rank`] |
//! | fingerprint | RSSI / AoA / ToA compared to a survey | [`fingerprint`] |

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::geom::Point2;

pub mod aoa;
pub mod fingerprint;
pub mod fusion;
pub mod rank;
pub mod tdoa;

pub use aoa::aoa_least_squares;
pub use fingerprint::{fingerprint_localize, AnchorFeatures, FingerprintMetric, FingerprintRecord};
pub use fusion::{fuse_aoa_pathloss, fuse_strongest_anchor, ml_distance};
pub use rank::{
    ideal_rank_vector, rank_grid_localize, rank_grid_residence, rank_vector, spearman_rho, DistanceRankVector,
    GridSpec, ResidenceArea,
};
pub use tdoa::tdoa_solve;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocateError {
    #[error("unknown anchor `{0}`")]
    UnknownAnchor(String),
    #[error("anchor `{0}` appears more than once")]
    DuplicateAnchor(String),
    #[error("insufficient observations: need {needed}, got {got}")]
    InsufficientObservations { needed: usize, got: usize },
    #[error("observation geometry is degenerate (condition number {0:e})")]
    DegenerateGeometry(f64),
    #[error("range difference {k} m between `{a}` and `{b}` exceeds their {baseline} m separation")]
    InfeasibleRangeDifference { a: String, b: String, k: f64, baseline: f64 },
    #[error("solver did not converge; best iterate ({:.6}, {:.6}) with residual {residual:e}", best.x, best.y)]
    NonConvergence { best: Point2, residual: f64 },
    #[error("path loss {path_loss} dB is below the {reference} dB free-space reference, implying d < 1 m")]
    BelowReferenceLoss { path_loss: f64, reference: f64 },
    #[error("observations refer to different anchors: `{0}` vs `{1}`")]
    AnchorMismatch(String, String),
    #[error("rank vectors cover different anchor sets")]
    MismatchedRankVectors,
    #[error("rank vectors need at least 2 anchors, got {0}")]
    RankVectorTooShort(usize),
    #[error("estimation rectangles of the ranked anchors do not overlap")]
    EmptyCoverage,
    #[error("grid cell size and communication range must be positive")]
    InvalidGrid,
    #[error("fingerprint database is empty")]
    EmptyDatabase,
    #[error("a fingerprint record needs at least one feature")]
    EmptyFingerprint,
    #[error("query shares no feature with any fingerprint record")]
    NoCommonFeatures,
    #[error("non-finite input value")]
    NonFinite,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// A transmitter at a surveyed position.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnchorNode {
    pub id: String,
    pub position: Point2,
    pub tx_power_dbm: f64,
    pub carrier_hz: f64,
}

impl AnchorNode {
    pub fn new(id: impl Into<String>, position: Point2, tx_power_dbm: f64, carrier_hz: f64) -> Self {
        Self { id: id.into(), position, tx_power_dbm, carrier_hz }
    }
}

/// Looks up an anchor by id.
pub fn find_anchor<'a>(anchors: &'a [AnchorNode], id: &str) -> Result<&'a AnchorNode, LocateError> {
    anchors.iter().find(|a| a.id == id).ok_or_else(|| LocateError::UnknownAnchor(id.into()))
}

/// Angle of arrival at the receiver: the direction from the receiver toward
/// the anchor, in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BearingObservation {
    pub anchor_id: String,
    pub aoa: f64,
}

impl BearingObservation {
    pub fn new(anchor_id: impl Into<String>, aoa: f64) -> Self {
        Self { anchor_id: anchor_id.into(), aoa: crate::math::wrap_tau(aoa) }
    }
}

/// Range difference `d(rx, a) − d(rx, b)` in meters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TdoaObservation {
    pub anchor_a_id: String,
    pub anchor_b_id: String,
    pub delta_distance: f64,
}

impl TdoaObservation {
    pub fn new(a: impl Into<String>, b: impl Into<String>, delta_distance: f64) -> Self {
        Self { anchor_a_id: a.into(), anchor_b_id: b.into(), delta_distance }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RssiObservation {
    pub anchor_id: String,
    pub rssi_dbm: f64,
}

impl RssiObservation {
    pub fn new(anchor_id: impl Into<String>, rssi_dbm: f64) -> Self {
        Self { anchor_id: anchor_id.into(), rssi_dbm }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Aoa,
    Fusion,
    Tdoa,
    Rank,
    Fingerprint,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Aoa => "aoa",
            Method::Fusion => "fusion",
            Method::Tdoa => "tdoa",
            Method::Rank => "rank",
            Method::Fingerprint => "fingerprint",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "aoa" => Method::Aoa,
            "fusion" => Method::Fusion,
            "tdoa" => Method::Tdoa,
            "rank" => Method::Rank,
            "fingerprint" => Method::Fingerprint,
            other => return Err(alloc::format!("unknown method `{other}`")),
        })
    }
}

/// Output of every localizer.
///
/// `residual` depends on the method: the minimized squared distance for AoA
/// and TDoA, `1 − ρ_max` for the rank grid, the normalized feature distance for
/// fingerprints, and zero for the single-anchor fusion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositionEstimate {
    pub point: Point2,
    pub method: Method,
    pub residual: f64,
    pub diagnostics: Vec<String>,
}

impl PositionEstimate {
    pub fn new(point: Point2, method: Method, residual: f64) -> Self {
        Self { point, method, residual, diagnostics: Vec::new() }
    }
}
