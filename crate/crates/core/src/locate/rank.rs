//! Localization from the ordering of anchors by received power.
//!
//! RSSI decreases with distance, so sorting anchors by RSSI gives a distance
//! rank vector. The plane is tiled into cells inside the overlap of every
//! ranked anchor's estimation rectangle (a `2R × 2R` square centered on the
//! anchor), each cell center gets its ideal rank vector from true distances,
//! and the cells whose vector correlates best with the measured one (Spearman
//! ρ) form the residence area. The estimate is the residence area's centroid.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{find_anchor, AnchorNode, LocateError, Method, PositionEstimate, RssiObservation};
use crate::geom::Point2;
use crate::math;

/// Anchor ids ordered nearest (strongest) first.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceRankVector(Vec<String>);

impl DistanceRankVector {
    /// Builds a vector from an explicit ordering; ids must be unique.
    pub fn new(ids: Vec<String>) -> Result<Self, LocateError> {
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(LocateError::DuplicateAnchor(id.clone()));
            }
        }
        Ok(Self(ids))
    }

    pub fn ids(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rank (0 = nearest) of `id`.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.0.iter().position(|x| x == id)
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().cloned().collect())
    }
}

/// Sorts anchors by RSSI, strongest first; equal RSSIs order by id.
pub fn rank_vector(observations: &[RssiObservation]) -> Result<DistanceRankVector, LocateError> {
    if observations.is_empty() {
        return Err(LocateError::InsufficientObservations { needed: 1, got: 0 });
    }
    for (i, o) in observations.iter().enumerate() {
        if !o.rssi_dbm.is_finite() {
            return Err(LocateError::NonFinite);
        }
        if observations[..i].iter().any(|p| p.anchor_id == o.anchor_id) {
            return Err(LocateError::DuplicateAnchor(o.anchor_id.clone()));
        }
    }
    let mut sorted: Vec<&RssiObservation> = observations.iter().collect();
    sorted.sort_by(|a, b| {
        b.rssi_dbm
            .partial_cmp(&a.rssi_dbm)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.anchor_id.cmp(&b.anchor_id))
    });
    Ok(DistanceRankVector(sorted.into_iter().map(|o| o.anchor_id.clone()).collect()))
}

/// `Σ d_i²` over the rank differences of each anchor.
fn rank_distance_sq(u: &DistanceRankVector, v: &DistanceRankVector) -> Result<u64, LocateError> {
    if u.len() != v.len() {
        return Err(LocateError::MismatchedRankVectors);
    }
    let mut sum = 0u64;
    for (i, id) in u.0.iter().enumerate() {
        let j = v.rank_of(id).ok_or(LocateError::MismatchedRankVectors)?;
        let d = i.abs_diff(j) as u64;
        sum += d * d;
    }
    Ok(sum)
}

fn rho_from(sum_sq: u64, m: usize) -> f64 {
    let m = m as f64;
    1.0 - 6.0 * sum_sq as f64 / (m * (m * m - 1.0))
}

/// Spearman rank-order correlation `1 − 6·Σd²/(m(m²−1))`.
pub fn spearman_rho(u: &DistanceRankVector, v: &DistanceRankVector) -> Result<f64, LocateError> {
    if u.len() < 2 {
        return Err(LocateError::RankVectorTooShort(u.len()));
    }
    Ok(rho_from(rank_distance_sq(u, v)?, u.len()))
}

/// Ordering of `ids` by true distance from `point`, ties broken by id.
pub fn ideal_rank_vector(anchors: &[&AnchorNode], point: Point2) -> DistanceRankVector {
    let mut sorted: Vec<(f64, &str)> = anchors.iter().map(|a| (a.position.distance(point), a.id.as_str())).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(b.1)));
    DistanceRankVector(sorted.into_iter().map(|(_, id)| id.into()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub cell_size: f64,
    /// Half-side of each anchor's estimation rectangle (m).
    pub comm_range: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { cell_size: 20.0, comm_range: 200.0 }
    }
}

/// Cells that best explain a measured rank vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidenceArea {
    /// Lower-left corner of the estimation-rectangle overlap (cell origin).
    pub origin: Point2,
    /// Upper-right corner of the overlap.
    pub extent: Point2,
    pub cell_size: f64,
    /// Cell counts along x and y.
    pub shape: (usize, usize),
    /// `(column, row)` of every residence cell, row-major.
    pub cells: Vec<(usize, usize)>,
    pub rho_max: f64,
}

impl ResidenceArea {
    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        Point2::new(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn contains_cell(&self, col: usize, row: usize) -> bool {
        self.cells.contains(&(col, row))
    }

    pub fn centroid(&self) -> Point2 {
        let sum = self.cells.iter().fold(Point2::ORIGIN, |acc, &(c, r)| acc + self.cell_center(c, r));
        sum * (1.0 / self.cells.len() as f64)
    }
}

fn cell_count(span: f64, cell: f64) -> usize {
    (math::ceil(span / cell - 1e-9) as usize).max(1)
}

/// Scores every grid cell in the estimation-rectangle overlap.
pub fn rank_grid_residence(
    anchors: &[AnchorNode],
    measured: &DistanceRankVector,
    grid: &GridSpec,
) -> Result<ResidenceArea, LocateError> {
    if !(grid.cell_size > 0.0 && grid.comm_range > 0.0 && grid.cell_size.is_finite() && grid.comm_range.is_finite())
    {
        return Err(LocateError::InvalidGrid);
    }
    if measured.is_empty() {
        return Err(LocateError::InsufficientObservations { needed: 1, got: 0 });
    }
    let ranked: Vec<&AnchorNode> = measured.0.iter().map(|id| find_anchor(anchors, id)).collect::<Result<_, _>>()?;

    let r = grid.comm_range;
    let (mut lo, mut hi) = (Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY), Point2::new(f64::INFINITY, f64::INFINITY));
    for a in &ranked {
        lo = Point2::new(lo.x.max(a.position.x - r), lo.y.max(a.position.y - r));
        hi = Point2::new(hi.x.min(a.position.x + r), hi.y.min(a.position.y + r));
    }
    if !(hi.x > lo.x && hi.y > lo.y) {
        return Err(LocateError::EmptyCoverage);
    }

    let cols = cell_count(hi.x - lo.x, grid.cell_size);
    let rows = cell_count(hi.y - lo.y, grid.cell_size);
    let mut area = ResidenceArea {
        origin: lo,
        extent: hi,
        cell_size: grid.cell_size,
        shape: (cols, rows),
        cells: Vec::new(),
        rho_max: 1.0,
    };
    let m = measured.len();
    let mut best = u64::MAX;
    for row in 0..rows {
        for col in 0..cols {
            let ideal = ideal_rank_vector(&ranked, area.cell_center(col, row));
            let s = rank_distance_sq(measured, &ideal)?;
            match s.cmp(&best) {
                Ordering::Less => {
                    best = s;
                    area.cells.clear();
                    area.cells.push((col, row));
                }
                Ordering::Equal => area.cells.push((col, row)),
                Ordering::Greater => {}
            }
        }
    }
    // a single anchor ranks every cell identically
    area.rho_max = if m >= 2 { rho_from(best, m) } else { 1.0 };
    Ok(area)
}

/// Centroid of the residence area; the residual is `1 − ρ_max`.
pub fn rank_grid_localize(
    anchors: &[AnchorNode],
    measured: &DistanceRankVector,
    grid: &GridSpec,
) -> Result<PositionEstimate, LocateError> {
    let area = rank_grid_residence(anchors, measured, grid)?;
    let mut est = PositionEstimate::new(area.centroid(), Method::Rank, 1.0 - area.rho_max);
    est.diagnostics.push(alloc::format!("residence_cells={} rho_max={}", area.cells.len(), area.rho_max));
    Ok(est)
}
