//! Least-squares intersection of bearing lines.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{find_anchor, BearingObservation, LocateError, Method, PositionEstimate};
use crate::geom::Point2;
use crate::math;

/// Largest accepted condition number of the normal matrix.
const MAX_CONDITION: f64 = 1e12;

/// Point minimizing the summed squared perpendicular distance to every
/// bearing line.
///
/// Each line passes through its anchor along `aoa + π`, the direction from
/// the anchor toward the receiver.
pub fn aoa_least_squares(
    anchors: &[super::AnchorNode],
    bearings: &[BearingObservation],
) -> Result<PositionEstimate, LocateError> {
    let mut lines: Vec<(Point2, Point2)> = Vec::with_capacity(bearings.len());
    let mut distinct: Vec<&str> = Vec::new();
    for b in bearings {
        if !b.aoa.is_finite() {
            return Err(LocateError::NonFinite);
        }
        let anchor = find_anchor(anchors, &b.anchor_id)?;
        if !distinct.contains(&anchor.id.as_str()) {
            distinct.push(&anchor.id);
        }
        // unit normal of the line
        lines.push((anchor.position, Point2::from_heading(b.aoa + PI).perp()));
    }
    if distinct.len() < 2 {
        return Err(LocateError::InsufficientObservations { needed: 2, got: distinct.len() });
    }

    let (mut sxx, mut sxy, mut syy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, n) in &lines {
        let proj = n.dot(*p);
        sxx += n.x * n.x;
        sxy += n.x * n.y;
        syy += n.y * n.y;
        bx += n.x * proj;
        by += n.y * proj;
    }
    let half_trace = 0.5 * (sxx + syy);
    let det = sxx * syy - sxy * sxy;
    let spread = math::sqrt((half_trace * half_trace - det).max(0.0));
    let (lmax, lmin) = (half_trace + spread, half_trace - spread);
    if !(lmin > 0.0) || lmax / lmin > MAX_CONDITION {
        let cond = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
        return Err(LocateError::DegenerateGeometry(cond));
    }
    let x = (syy * bx - sxy * by) / det;
    let y = (sxx * by - sxy * bx) / det;
    let point = Point2::new(x, y);
    let residual = lines.iter().map(|(p, n)| math::sq(n.dot(point - *p))).sum();
    Ok(PositionEstimate::new(point, Method::Aoa, residual))
}
