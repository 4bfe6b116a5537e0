use std::path::PathBuf;

use mmloc_core::geom::GeomError;
use mmloc_core::locate::LocateError;
use mmloc_core::raytracer::TraceError;
use mmloc_core::signal::SignalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("map JSON, line {line} column {column}: {message}")]
    MapSyntax { line: usize, column: usize, message: String },
    #[error("invalid map: {0}")]
    MapInvalid(GeomError),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: unknown anchor `{id}`")]
    UnknownAnchor { line: u64, id: String },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("{0} is empty")]
    EmptyInput(String),
    #[error("no ground truth for rx `{0}`")]
    MissingTruth(String),
    #[error("rx `{rx}`: {source}")]
    Locate { rx: String, source: LocateError },
    #[error("rx `{rx}`, anchor `{anchor}`: {source}")]
    Trace { rx: String, anchor: String, source: TraceError },
    #[error("invalid campaign: {0}")]
    Campaign(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

/// Line number of a CSV record (1-based, header is line 1).
pub(crate) fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}
