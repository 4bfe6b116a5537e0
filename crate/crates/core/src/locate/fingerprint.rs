//! Nearest-neighbor matching against a surveyed grid of (RSSI, AoA, ToA)
//! fingerprints.

use alloc::string::String;
use alloc::vec::Vec;

use super::{LocateError, Method, PositionEstimate};
use crate::geom::Point2;
use crate::math;

/// Features observed from one anchor. Absent features are `None`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnchorFeatures {
    pub anchor_id: String,
    pub rssi_dbm: Option<f64>,
    /// Radians.
    pub aoa: Option<f64>,
    /// Seconds.
    pub toa: Option<f64>,
}

impl AnchorFeatures {
    pub fn is_empty(&self) -> bool {
        self.rssi_dbm.is_none() && self.aoa.is_none() && self.toa.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FingerprintRecord {
    pub location: Point2,
    pub features: Vec<AnchorFeatures>,
}

impl FingerprintRecord {
    pub fn new(location: Point2, features: Vec<AnchorFeatures>) -> Result<Self, LocateError> {
        if features.iter().all(AnchorFeatures::is_empty) {
            return Err(LocateError::EmptyFingerprint);
        }
        Ok(Self { location, features })
    }
}

/// Weighted, normalized squared feature distance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FingerprintMetric {
    pub w_rssi: f64,
    pub w_aoa: f64,
    pub w_toa: f64,
    /// dB
    pub sigma_rssi: f64,
    /// rad
    pub sigma_aoa: f64,
    /// s
    pub sigma_toa: f64,
}

impl FingerprintMetric {
    /// Unit weights with `σ_rssi = 4 dB`, `σ_aoa = HPBW/2` and `σ_toa = 1/B`.
    pub fn new(hpbw: f64, bandwidth_hz: f64) -> Self {
        Self {
            w_rssi: 1.0,
            w_aoa: 1.0,
            w_toa: 1.0,
            sigma_rssi: 4.0,
            sigma_aoa: hpbw / 2.0,
            sigma_toa: 1.0 / bandwidth_hz,
        }
    }

    /// Distance between two feature sets, averaged over the weights of the
    /// features both carry. `None` when they share nothing.
    pub fn distance(&self, a: &[AnchorFeatures], b: &[AnchorFeatures]) -> Option<f64> {
        let mut acc = 0.0;
        let mut weight = 0.0;
        for fa in a {
            let Some(fb) = b.iter().find(|f| f.anchor_id == fa.anchor_id) else {
                continue;
            };
            if let (Some(x), Some(y)) = (fa.rssi_dbm, fb.rssi_dbm) {
                acc += self.w_rssi * math::sq((x - y) / self.sigma_rssi);
                weight += self.w_rssi;
            }
            if let (Some(x), Some(y)) = (fa.aoa, fb.aoa) {
                acc += self.w_aoa * math::sq(math::wrap_pi(x - y) / self.sigma_aoa);
                weight += self.w_aoa;
            }
            if let (Some(x), Some(y)) = (fa.toa, fb.toa) {
                acc += self.w_toa * math::sq((x - y) / self.sigma_toa);
                weight += self.w_toa;
            }
        }
        (weight > 0.0).then(|| acc / weight)
    }
}

impl Default for FingerprintMetric {
    /// 15° beams and 800 MHz of bandwidth.
    fn default() -> Self {
        Self::new(15f64.to_radians(), 800e6)
    }
}

/// Location of the record closest to `query`; the first record wins ties.
pub fn fingerprint_localize(
    db: &[FingerprintRecord],
    query: &[AnchorFeatures],
    metric: &FingerprintMetric,
) -> Result<PositionEstimate, LocateError> {
    if db.is_empty() {
        return Err(LocateError::EmptyDatabase);
    }
    let mut best: Option<(f64, &FingerprintRecord)> = None;
    for rec in db {
        let Some(d) = metric.distance(query, &rec.features) else {
            continue;
        };
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, rec));
        }
    }
    let (d, rec) = best.ok_or(LocateError::NoCommonFeatures)?;
    Ok(PositionEstimate::new(rec.location, Method::Fingerprint, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn feat(id: &str, rssi: Option<f64>, aoa: Option<f64>, toa: Option<f64>) -> AnchorFeatures {
        AnchorFeatures { anchor_id: id.into(), rssi_dbm: rssi, aoa, toa }
    }

    fn db() -> Vec<FingerprintRecord> {
        vec![
            FingerprintRecord::new(
                Point2::new(0.0, 0.0),
                vec![feat("A", Some(-60.0), Some(0.1), Some(10e-9)), feat("B", Some(-75.0), Some(2.0), Some(40e-9))],
            )
            .unwrap(),
            FingerprintRecord::new(
                Point2::new(5.0, 0.0),
                vec![feat("A", Some(-66.0), Some(0.2), Some(25e-9)), feat("B", Some(-70.0), Some(2.5), Some(30e-9))],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn exact_query_matches() {
        let db = db();
        let est = fingerprint_localize(&db, &db[1].features, &FingerprintMetric::default()).unwrap();
        assert_eq!(est.point, Point2::new(5.0, 0.0));
        assert_eq!(est.residual, 0.0);
    }

    #[test]
    fn rssi_only_query() {
        let q = [feat("A", Some(-61.0), None, None), feat("B", Some(-74.0), None, None)];
        let est = fingerprint_localize(&db(), &q, &FingerprintMetric::default()).unwrap();
        assert_eq!(est.point, Point2::ORIGIN);
        assert!((est.residual - (1.0 / 16.0)).abs() < 1e-15);
    }

    #[test]
    fn aoa_difference_wraps() {
        let m = FingerprintMetric::default();
        let a = [feat("A", None, Some(0.01), None)];
        let b = [feat("A", None, Some(core::f64::consts::TAU - 0.01), None)];
        let d = m.distance(&a, &b).unwrap();
        assert!((d - (0.02 / m.sigma_aoa).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let m = FingerprintMetric::default();
        assert_eq!(fingerprint_localize(&[], &[], &m), Err(LocateError::EmptyDatabase));
        let q = [feat("Z", Some(-60.0), None, None)];
        assert_eq!(fingerprint_localize(&db(), &q, &m), Err(LocateError::NoCommonFeatures));
        assert_eq!(
            FingerprintRecord::new(Point2::ORIGIN, vec![feat("A", None, None, None)]),
            Err(LocateError::EmptyFingerprint)
        );
    }
}
