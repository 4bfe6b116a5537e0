//! Runs one localizer over every receiver of an observation set.

use mmloc_core::channel::CiPathLossModel;
use mmloc_core::locate::{
    aoa_least_squares, fingerprint_localize, fuse_strongest_anchor, rank_grid_localize, rank_vector, tdoa_solve,
    AnchorNode, FingerprintMetric, FingerprintRecord, GridSpec, LocateError, Method, PositionEstimate,
};

use crate::error::{Error, Result};
use crate::formats::EstimateRow;
use crate::observations::{MeasurementRecord, ObservationSet};

#[derive(Debug, Clone)]
pub struct LocalizeOptions {
    pub method: Method,
    pub grid: GridSpec,
    /// CI path-loss exponent for fusion.
    pub ple: f64,
    pub antenna_gains_db: f64,
    pub metric: FingerprintMetric,
    /// Surveyed records for fingerprinting.
    pub survey: Vec<FingerprintRecord>,
}

impl LocalizeOptions {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            grid: GridSpec::default(),
            ple: CiPathLossModel::INDOOR_LOS_PLE,
            antenna_gains_db: 0.0,
            metric: FingerprintMetric::default(),
            survey: Vec::new(),
        }
    }
}

/// Feature columns `method` cannot work without.
pub fn required_columns(method: Method) -> &'static [&'static str] {
    match method {
        Method::Aoa => &["aoa_deg"],
        Method::Fusion => &["rssi_dbm", "aoa_deg"],
        Method::Tdoa => &["toa_ns"],
        Method::Rank => &["rssi_dbm"],
        Method::Fingerprint => &[],
    }
}

/// Turns a surveyed observation set into fingerprint records; every
/// receiver needs its ground truth.
pub fn survey_records(set: &ObservationSet) -> Result<Vec<FingerprintRecord>> {
    set.records
        .iter()
        .map(|r| {
            let at = r.true_position.ok_or_else(|| Error::MissingTruth(r.rx_id.clone()))?;
            FingerprintRecord::new(at, r.features()).map_err(|source| Error::Locate { rx: r.rx_id.clone(), source })
        })
        .collect()
}

pub fn localize_record(
    record: &MeasurementRecord,
    anchors: &[AnchorNode],
    opts: &LocalizeOptions,
) -> Result<PositionEstimate, LocateError> {
    match opts.method {
        Method::Aoa => aoa_least_squares(anchors, &record.bearings()),
        Method::Fusion => {
            fuse_strongest_anchor(anchors, &record.bearings(), &record.rssis(), opts.ple, opts.antenna_gains_db)
        }
        Method::Tdoa => tdoa_solve(anchors, &record.tdoa_pairs(), None),
        Method::Rank => rank_grid_localize(anchors, &rank_vector(&record.rssis())?, &opts.grid),
        Method::Fingerprint => fingerprint_localize(&opts.survey, &record.features(), &opts.metric),
    }
}

/// One estimate per receiver, ordered by `rx_id`. The first receiver that
/// cannot be localized aborts the run.
pub fn localize_all(set: &ObservationSet, anchors: &[AnchorNode], opts: &LocalizeOptions) -> Result<Vec<EstimateRow>> {
    for col in required_columns(opts.method) {
        set.require_column(col)?;
    }
    if opts.method == Method::Fingerprint && !["rssi_dbm", "aoa_deg", "toa_ns"].iter().any(|c| set.has_column(c)) {
        return Err(Error::MissingColumn("rssi_dbm".into()));
    }
    let mut records: Vec<&MeasurementRecord> = set.records.iter().collect();
    records.sort_by(|a, b| a.rx_id.cmp(&b.rx_id));
    records
        .into_iter()
        .map(|r| {
            let est = localize_record(r, anchors, opts).map_err(|source| Error::Locate { rx: r.rx_id.clone(), source })?;
            Ok(EstimateRow { rx_id: r.rx_id.clone(), method: est.method, x_m: est.point.x, y_m: est.point.y, residual: est.residual })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observations::read_observations;
    use mmloc_core::geom::Point2;

    fn anchors() -> Vec<AnchorNode> {
        vec![
            AnchorNode::new("A", Point2::new(0.0, 0.0), 0.0, 28e9),
            AnchorNode::new("B", Point2::new(10.0, 0.0), 0.0, 28e9),
        ]
    }

    #[test]
    fn missing_column_is_named() {
        let set = read_observations("rx_id,anchor_id,rssi_dbm\nr,A,-50\n".as_bytes(), None).unwrap();
        let err = localize_all(&set, &anchors(), &LocalizeOptions::new(Method::Aoa)).unwrap_err();
        assert!(err.to_string().contains("aoa_deg"), "{err}");
    }

    #[test]
    fn output_is_sorted_by_rx() {
        let text = "rx_id,anchor_id,aoa_deg\nr2,A,225\nr2,B,315\nr1,A,180\nr1,B,0\n";
        let set = read_observations(text.as_bytes(), None).unwrap();
        let err = localize_all(&set, &anchors(), &LocalizeOptions::new(Method::Aoa)).unwrap_err();
        // r1's bearings are collinear with the baseline
        assert!(matches!(err, Error::Locate { ref rx, .. } if rx == "r1"), "{err:?}");
        let text = "rx_id,anchor_id,aoa_deg\nr2,A,225\nr2,B,315\nr1,A,135\nr1,B,45\n";
        let set = read_observations(text.as_bytes(), None).unwrap();
        let rows = localize_all(&set, &anchors(), &LocalizeOptions::new(Method::Aoa)).unwrap();
        assert_eq!(rows[0].rx_id, "r1");
        assert!((rows[0].x_m - 5.0).abs() < 1e-9 && (rows[0].y_m + 5.0).abs() < 1e-9, "{rows:?}");
        assert!((rows[1].x_m - 5.0).abs() < 1e-9 && (rows[1].y_m - 5.0).abs() < 1e-9, "{rows:?}");
    }
}
