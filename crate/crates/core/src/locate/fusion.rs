//! AoA + path-loss fusion: range from RSSI under the CI model, direction from
//! the bearing, both measured against a single LOS anchor.

use alloc::format;
use core::f64::consts::PI;

use super::{AnchorNode, BearingObservation, LocateError, Method, PositionEstimate, RssiObservation};
use crate::channel::CiPathLossModel;
use crate::geom::Point2;
use crate::math;

/// Maximum-likelihood distance for a measured path loss under the CI model:
/// `d0 · 10^((PL − PL_FS(d0)) / (10·n))`.
pub fn ml_distance(model: &CiPathLossModel, path_loss_db: f64) -> Result<f64, LocateError> {
    if !path_loss_db.is_finite() {
        return Err(LocateError::NonFinite);
    }
    let reference = model.reference_loss();
    if path_loss_db < reference {
        return Err(LocateError::BelowReferenceLoss { path_loss: path_loss_db, reference });
    }
    let exponent = (path_loss_db - reference) / (10.0 * model.ple());
    Ok(model.reference_distance() * math::powf(10.0, exponent))
}

/// Places the receiver `d_ML` meters from the anchor along the departure
/// angle `β = α + π`.
pub fn fuse_aoa_pathloss(
    anchor: &AnchorNode,
    bearing: &BearingObservation,
    rssi: &RssiObservation,
    model: &CiPathLossModel,
    antenna_gains_db: f64,
) -> Result<PositionEstimate, LocateError> {
    if bearing.anchor_id != anchor.id {
        return Err(LocateError::AnchorMismatch(anchor.id.clone(), bearing.anchor_id.clone()));
    }
    if rssi.anchor_id != anchor.id {
        return Err(LocateError::AnchorMismatch(anchor.id.clone(), rssi.anchor_id.clone()));
    }
    if !bearing.aoa.is_finite() || !rssi.rssi_dbm.is_finite() {
        return Err(LocateError::NonFinite);
    }
    let path_loss = anchor.tx_power_dbm + antenna_gains_db - rssi.rssi_dbm;
    let distance = ml_distance(model, path_loss)?;
    let departure = bearing.aoa + PI;
    let point = anchor.position + Point2::from_heading(departure) * distance;
    let mut est = PositionEstimate::new(point, Method::Fusion, 0.0);
    est.diagnostics.push(format!("anchor={} d_ml_m={distance}", anchor.id));
    Ok(est)
}

/// Fusion against the anchor with the strongest RSSI among those that also
/// have a bearing; that anchor is the most likely to be in LOS. The CI model
/// uses exponent `ple` at that anchor's carrier.
pub fn fuse_strongest_anchor(
    anchors: &[AnchorNode],
    bearings: &[BearingObservation],
    rssis: &[RssiObservation],
    ple: f64,
    antenna_gains_db: f64,
) -> Result<PositionEstimate, LocateError> {
    let best = rssis
        .iter()
        .filter(|r| bearings.iter().any(|b| b.anchor_id == r.anchor_id))
        .reduce(|best, r| if r.rssi_dbm > best.rssi_dbm { r } else { best })
        .ok_or(LocateError::InsufficientObservations { needed: 1, got: 0 })?;
    let anchor = super::find_anchor(anchors, &best.anchor_id)?;
    let bearing = bearings.iter().find(|b| b.anchor_id == best.anchor_id).expect("filtered above");
    let model = CiPathLossModel::new(ple, anchor.carrier_hz)?;
    fuse_aoa_pathloss(anchor, bearing, best, &model, antenna_gains_db)
}
