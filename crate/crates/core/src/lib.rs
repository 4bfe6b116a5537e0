//! Channel prediction and position location for millimeter-wave links.
//!
//! The crate is `no_std` and only needs an allocator. It covers:
//!
//! - [`geom`]: 2-D points, walls, environment maps and ray/wall intersection.
//! - [`channel`]: raw resolution, close-in (CI) path loss and Fresnel power
//!   coefficients.
//! - [`raytracer`]: a brute-force 2-D ray launcher with a detection sphere,
//!   producing multipath components and a power delay profile.
//! - [`signal`]: cross-correlation, chirp beat-frequency and multi-carrier
//!   phase delay estimators.
//! - [`locate`]: TDoA, AoA least squares, AoA + path-loss fusion, RSSI rank
//!   grid localization and fingerprint matching.
//!
//! File formats, campaign generation and the command-line tool live in the
//! `mmloc` companion crate.
#![no_std]
// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod geom;
pub mod locate;
pub(crate) mod math;
pub mod raytracer;
pub mod signal;

pub use channel::{CiPathLossModel, FrequencyBand, FresnelResult, SPEED_OF_LIGHT};
pub use geom::{EnvironmentMap, GeomError, Obstruction, Point2, Ray2, Segment};
pub use locate::{AnchorNode, LocateError, Method, PositionEstimate};
pub use raytracer::{ChannelPrediction, PowerDelayProfile, RayPath, TraceConfig, TraceError};
