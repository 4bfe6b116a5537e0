//! Per-receiver measurement records and their CSV form.
//!
//! One row per (rx, anchor) pair:
//! `rx_id,anchor_id,rssi_dbm,aoa_deg,toa_ns,true_x_m,true_y_m`.
//! `rx_id` and `anchor_id` are required; every other column may be missing
//! from the header, and an empty field means the feature was not observed.

use std::io::{Read, Write};
use std::path::Path;

use mmloc_core::geom::Point2;
use mmloc_core::locate::{AnchorFeatures, AnchorNode, BearingObservation, RssiObservation, TdoaObservation};
use mmloc_core::SPEED_OF_LIGHT;

use crate::error::{io_err, record_line, Error, Result};

pub const COLUMNS: [&str; 7] = ["rx_id", "anchor_id", "rssi_dbm", "aoa_deg", "toa_ns", "true_x_m", "true_y_m"];

/// What one receiver observed from one anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorObservation {
    pub anchor_id: String,
    pub rssi_dbm: Option<f64>,
    /// Radians in `[0, 2π)`.
    pub aoa: Option<f64>,
    /// Seconds.
    pub toa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub rx_id: String,
    pub true_position: Option<Point2>,
    pub observations: Vec<AnchorObservation>,
}

impl MeasurementRecord {
    pub fn bearings(&self) -> Vec<BearingObservation> {
        self.observations
            .iter()
            .filter_map(|o| o.aoa.map(|a| BearingObservation::new(o.anchor_id.clone(), a)))
            .collect()
    }

    pub fn rssis(&self) -> Vec<RssiObservation> {
        self.observations
            .iter()
            .filter_map(|o| o.rssi_dbm.map(|r| RssiObservation::new(o.anchor_id.clone(), r)))
            .collect()
    }

    /// Range differences of every anchor against the first one with a ToA.
    pub fn tdoa_pairs(&self) -> Vec<TdoaObservation> {
        let mut timed = self.observations.iter().filter_map(|o| o.toa.map(|t| (&o.anchor_id, t)));
        let Some((ref_id, ref_toa)) = timed.next() else {
            return Vec::new();
        };
        timed
            .map(|(id, t)| TdoaObservation::new(id.clone(), ref_id.clone(), SPEED_OF_LIGHT * (t - ref_toa)))
            .collect()
    }

    pub fn features(&self) -> Vec<AnchorFeatures> {
        self.observations
            .iter()
            .map(|o| AnchorFeatures { anchor_id: o.anchor_id.clone(), rssi_dbm: o.rssi_dbm, aoa: o.aoa, toa: o.toa })
            .collect()
    }
}

/// Parsed observation file: records in first-appearance order of `rx_id`,
/// plus the optional columns present in the header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservationSet {
    pub columns: Vec<String>,
    pub records: Vec<MeasurementRecord>,
}

impl ObservationSet {
    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    /// Fails naming `name` unless the header has it.
    pub fn require_column(&self, name: &str) -> Result<()> {
        if self.has_column(name) {
            Ok(())
        } else {
            Err(Error::MissingColumn(name.into()))
        }
    }
}

/// Angle in `[0, 2π)`.
pub(crate) fn wrap_tau(a: f64) -> f64 {
    let r = a.rem_euclid(std::f64::consts::TAU);
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}

fn parse_opt(rec: &csv::StringRecord, idx: Option<usize>, column: &str) -> Result<Option<f64>> {
    let Some(raw) = idx.and_then(|i| rec.get(i)).map(str::trim) else {
        return Ok(None);
    };
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::Row {
            line: record_line(rec),
            message: format!("column `{column}`: invalid number `{raw}`"),
        }),
    }
}

fn csv_row_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Row { line: p.line(), message: e.to_string() },
        None => Error::Csv(e),
    }
}

/// Reads observations; with `anchors`, every anchor id must be known.
pub fn read_observations<R: Read>(reader: R, anchors: Option<&[AnchorNode]>) -> Result<ObservationSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let rx_col = find("rx_id").ok_or_else(|| Error::MissingColumn("rx_id".into()))?;
    let anchor_col = find("anchor_id").ok_or_else(|| Error::MissingColumn("anchor_id".into()))?;
    let [rssi_col, aoa_col, toa_col, tx_col, ty_col] = ["rssi_dbm", "aoa_deg", "toa_ns", "true_x_m", "true_y_m"].map(find);

    let mut set = ObservationSet {
        columns: COLUMNS[2..].iter().filter(|c| find(c).is_some()).map(|c| c.to_string()).collect(),
        records: Vec::new(),
    };
    for row in rdr.records() {
        let rec = row.map_err(csv_row_error)?;
        let line = record_line(&rec);
        let rx_id = rec.get(rx_col).unwrap_or_default();
        let anchor_id = rec.get(anchor_col).unwrap_or_default();
        if rx_id.is_empty() || anchor_id.is_empty() {
            return Err(Error::Row { line, message: "rx_id and anchor_id must be non-empty".into() });
        }
        if let Some(known) = anchors {
            if !known.iter().any(|a| a.id == anchor_id) {
                return Err(Error::UnknownAnchor { line, id: anchor_id.into() });
            }
        }
        let truth = match (parse_opt(&rec, tx_col, "true_x_m")?, parse_opt(&rec, ty_col, "true_y_m")?) {
            (Some(x), Some(y)) => Some(Point2::new(x, y)),
            (None, None) => None,
            _ => return Err(Error::Row { line, message: "true_x_m and true_y_m must be given together".into() }),
        };
        let obs = AnchorObservation {
            anchor_id: anchor_id.into(),
            rssi_dbm: parse_opt(&rec, rssi_col, "rssi_dbm")?,
            aoa: parse_opt(&rec, aoa_col, "aoa_deg")?.map(|d| wrap_tau(d.to_radians())),
            toa: parse_opt(&rec, toa_col, "toa_ns")?.map(|ns| ns * 1e-9),
        };

        let idx = match set.records.iter().position(|r| r.rx_id == rx_id) {
            Some(i) => i,
            None => {
                set.records.push(MeasurementRecord { rx_id: rx_id.into(), true_position: truth, observations: Vec::new() });
                set.records.len() - 1
            }
        };
        let record = &mut set.records[idx];
        if record.observations.iter().any(|o| o.anchor_id == obs.anchor_id) {
            return Err(Error::Row { line, message: format!("duplicate row for rx `{rx_id}`, anchor `{anchor_id}`") });
        }
        if record.true_position != truth {
            return Err(Error::Row { line, message: format!("conflicting ground truth for rx `{rx_id}`") });
        }
        record.observations.push(obs);
    }
    Ok(set)
}

pub fn load_observations(path: &Path, anchors: Option<&[AnchorNode]>) -> Result<ObservationSet> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_observations(file, anchors)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes all seven columns, one row per (rx, anchor) observation.
pub fn write_observations<W: Write>(writer: W, records: &[MeasurementRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in records {
        for o in &r.observations {
            w.write_record([
                r.rx_id.clone(),
                o.anchor_id.clone(),
                fmt_opt(o.rssi_dbm),
                fmt_opt(o.aoa.map(f64::to_degrees)),
                fmt_opt(o.toa.map(|t| t * 1e9)),
                fmt_opt(r.true_position.map(|p| p.x)),
                fmt_opt(r.true_position.map(|p| p.y)),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
