//! Small CSV formats: anchors, power delay profiles, sampled signals and
//! position estimates.

use std::io::{Read, Write};
use std::path::Path;

use mmloc_core::geom::Point2;
use mmloc_core::locate::{AnchorNode, Method};
use mmloc_core::raytracer::PowerDelayProfile;
use mmloc_core::signal::SampledSignal;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, record_line, Error, Result};

fn row_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Row { line: p.line(), message: e.to_string() },
        None => Error::Csv(e),
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(io_err(path))
}

#[derive(Debug, Serialize, Deserialize)]
struct AnchorRow {
    anchor_id: String,
    x_m: f64,
    y_m: f64,
    tx_power_dbm: f64,
    carrier_hz: f64,
}

/// `anchor_id,x_m,y_m,tx_power_dbm,carrier_hz`; ids must be unique.
pub fn read_anchors<R: Read>(reader: R) -> Result<Vec<AnchorNode>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut anchors: Vec<AnchorNode> = Vec::new();
    for row in rdr.records() {
        let rec = row.map_err(row_error)?;
        let line = record_line(&rec);
        let r: AnchorRow = rec.deserialize(Some(&headers)).map_err(|e| Error::Row { line, message: e.to_string() })?;
        if anchors.iter().any(|a| a.id == r.anchor_id) {
            return Err(Error::Row { line, message: format!("duplicate anchor `{}`", r.anchor_id) });
        }
        let values = [r.x_m, r.y_m, r.tx_power_dbm, r.carrier_hz];
        if values.iter().any(|v| !v.is_finite()) || r.carrier_hz <= 0.0 {
            return Err(Error::Row { line, message: format!("anchor `{}` has invalid values", r.anchor_id) });
        }
        anchors.push(AnchorNode::new(r.anchor_id, Point2::new(r.x_m, r.y_m), r.tx_power_dbm, r.carrier_hz));
    }
    Ok(anchors)
}

pub fn load_anchors(path: &Path) -> Result<Vec<AnchorNode>> {
    read_anchors(open(path)?)
}

pub fn write_anchors<W: Write>(writer: W, anchors: &[AnchorNode]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for a in anchors {
        w.serialize(AnchorRow {
            anchor_id: a.id.clone(),
            x_m: a.position.x,
            y_m: a.position.y,
            tx_power_dbm: a.tx_power_dbm,
            carrier_hz: a.carrier_hz,
        })?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// One bin of a power delay profile as stored on disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdpPoint {
    pub delay_ns: f64,
    pub power_dbm: f64,
}

pub fn pdp_points(pdp: &PowerDelayProfile) -> Vec<PdpPoint> {
    pdp.bins.iter().map(|b| PdpPoint { delay_ns: b.delay * 1e9, power_dbm: b.power_dbm }).collect()
}

/// `delay_ns,power_dbm`, one row per bin; `None` writes the header only.
pub fn write_pdp<W: Write>(writer: W, pdp: Option<&PowerDelayProfile>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["delay_ns", "power_dbm"])?;
    for p in pdp.map(pdp_points).unwrap_or_default() {
        w.write_record([p.delay_ns.to_string(), p.power_dbm.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_pdp<R: Read>(reader: R) -> Result<Vec<PdpPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for row in rdr.records() {
        let rec = row.map_err(row_error)?;
        let line = record_line(&rec);
        let p: PdpPoint = rec.deserialize(Some(&headers)).map_err(|e| Error::Row { line, message: e.to_string() })?;
        if !p.delay_ns.is_finite() || !p.power_dbm.is_finite() || p.delay_ns < 0.0 {
            return Err(Error::Row { line, message: "invalid PDP bin".into() });
        }
        out.push(p);
    }
    Ok(out)
}

pub fn load_pdp(path: &Path) -> Result<Vec<PdpPoint>> {
    read_pdp(open(path)?)
}

/// `index,amplitude`; the sample rate is not stored and must be supplied.
pub fn read_signal<R: Read>(reader: R, sample_rate: f64) -> Result<SampledSignal> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut samples = Vec::new();
    for row in rdr.records() {
        let rec = row.map_err(row_error)?;
        let line = record_line(&rec);
        let bad = |message: String| Error::Row { line, message };
        let index: usize = rec.get(0).unwrap_or_default().parse().map_err(|_| bad("invalid index".into()))?;
        if index != samples.len() {
            return Err(bad(format!("expected index {}, found {index}", samples.len())));
        }
        let amp: f64 = rec.get(1).unwrap_or_default().parse().map_err(|_| bad("invalid amplitude".into()))?;
        if !amp.is_finite() {
            return Err(bad("invalid amplitude".into()));
        }
        samples.push(amp);
    }
    Ok(SampledSignal::new(sample_rate, samples)?)
}

pub fn write_signal<W: Write>(writer: W, signal: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "amplitude"])?;
    for (i, s) in signal.samples().iter().enumerate() {
        w.write_record([i.to_string(), s.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// One localizer output row: `rx_id,method,x_m,y_m,residual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub rx_id: String,
    pub method: Method,
    pub x_m: f64,
    pub y_m: f64,
    pub residual: f64,
}

impl EstimateRow {
    pub fn point(&self) -> Point2 {
        Point2::new(self.x_m, self.y_m)
    }
}

pub fn write_estimates<W: Write>(writer: W, rows: &[EstimateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_estimates<R: Read>(reader: R) -> Result<Vec<EstimateRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(row_error)).collect()
}

pub fn load_estimates(path: &Path) -> Result<Vec<EstimateRow>> {
    read_estimates(open(path)?)
}
