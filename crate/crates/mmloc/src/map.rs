//! Floor-plan JSON:
//! `{"width_m": w, "height_m": h, "walls": [{"id", "x1", "y1", "x2", "y2", "eps_r"}]}`
//! with coordinates in meters from the lower-left corner.

use std::path::Path;

use mmloc_core::geom::{EnvironmentMap, GeomError, Obstruction, Point2, Segment};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    width_m: f64,
    height_m: f64,
    #[serde(default)]
    walls: Vec<WallRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallRecord {
    id: String,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    eps_r: f64,
}

pub fn parse_map(text: &str) -> Result<EnvironmentMap> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Error::MapSyntax { line: e.line(), column: e.column(), message }
    })?;
    let mut walls = Vec::with_capacity(file.walls.len());
    for w in file.walls {
        let seg = Segment::new(Point2::new(w.x1, w.y1), Point2::new(w.x2, w.y2)).map_err(|e| match e {
            GeomError::DegenerateSegment => GeomError::DegenerateObstruction { id: w.id.clone() },
            other => other,
        });
        walls.push(Obstruction::new(w.id.clone(), seg.map_err(Error::MapInvalid)?, w.eps_r));
    }
    EnvironmentMap::new(file.width_m, file.height_m, walls).map_err(Error::MapInvalid)
}

pub fn load_map(path: &Path) -> Result<EnvironmentMap> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_map(&text)
}

pub fn map_to_json(env: &EnvironmentMap) -> String {
    let file = MapFile {
        width_m: env.width(),
        height_m: env.height(),
        walls: env
            .obstructions()
            .iter()
            .map(|o| WallRecord {
                id: o.id.clone(),
                x1: o.wall.a.x,
                y1: o.wall.a.y,
                x2: o.wall.b.x,
                y2: o.wall.b.y,
                eps_r: o.eps_r,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("map serializes")
}
