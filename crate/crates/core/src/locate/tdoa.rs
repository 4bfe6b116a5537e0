//! Hyperbolic positioning from range differences.
//!
//! The solver minimizes `Σ ((|p − a| − |p − b|) − k_ab)²` with
//! Levenberg-Marquardt. It is started from the requested guess (or the anchor
//! centroid) and from a ring of points around the anchors; with only two
//! anchor pairs the hyperbola arms can cross twice, in which case every
//! equally good minimum is found and the one nearest the guess is returned.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::{find_anchor, AnchorNode, LocateError, Method, PositionEstimate, TdoaObservation};
use crate::geom::Point2;

const MAX_ITERATIONS: usize = 200;
const FEASIBILITY_SLACK: f64 = 1e-6;
/// Minima this close are the same point (m).
const SAME_POINT: f64 = 1e-6;

struct Pair {
    a: Point2,
    b: Point2,
    k: f64,
}

fn cost(pairs: &[Pair], p: Point2) -> f64 {
    pairs.iter().map(|q| crate::math::sq(p.distance(q.a) - p.distance(q.b) - q.k)).sum()
}

fn unit_from(anchor: Point2, p: Point2) -> Point2 {
    (p - anchor).normalized().unwrap_or(Point2::ORIGIN)
}

struct Descent {
    point: Point2,
    cost: f64,
    converged: bool,
}

fn levenberg_marquardt(pairs: &[Pair], start: Point2, scale: f64) -> Descent {
    let mut p = start;
    let mut c = cost(pairs, p);
    let mut lambda = 1e-3;
    let tiny = 1e-28 * scale * scale;
    for _ in 0..MAX_ITERATIONS {
        if c <= tiny {
            return Descent { point: p, cost: c, converged: true };
        }
        let (mut hxx, mut hxy, mut hyy, mut gx, mut gy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for q in pairs {
            let r = p.distance(q.a) - p.distance(q.b) - q.k;
            let j = unit_from(q.a, p) - unit_from(q.b, p);
            hxx += j.x * j.x;
            hxy += j.x * j.y;
            hyy += j.y * j.y;
            gx += j.x * r;
            gy += j.y * r;
        }
        let mut stepped = false;
        while lambda < 1e12 {
            let (axx, ayy) = (hxx + lambda * (hxx + 1e-12), hyy + lambda * (hyy + 1e-12));
            let det = axx * ayy - hxy * hxy;
            if det > 0.0 {
                let dx = -(ayy * gx - hxy * gy) / det;
                let dy = -(axx * gy - hxy * gx) / det;
                let trial = Point2::new(p.x + dx, p.y + dy);
                let tc = cost(pairs, trial);
                if tc < c {
                    let moved = crate::math::hypot(dx, dy);
                    p = trial;
                    c = tc;
                    lambda = (lambda / 3.0).max(1e-12);
                    stepped = true;
                    if moved <= 1e-13 * (scale + p.norm()) {
                        return Descent { point: p, cost: c, converged: true };
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !stepped {
            // no descent direction left: a (possibly local) minimum
            return Descent { point: p, cost: c, converged: true };
        }
    }
    Descent { point: p, cost: c, converged: false }
}

/// Solves for the receiver position from range differences.
pub fn tdoa_solve(
    anchors: &[AnchorNode],
    observations: &[TdoaObservation],
    initial_guess: Option<Point2>,
) -> Result<PositionEstimate, LocateError> {
    let mut pairs = Vec::with_capacity(observations.len());
    let mut keys: Vec<(&str, &str)> = Vec::new();
    let mut used: Vec<Point2> = Vec::new();
    for obs in observations {
        let a = find_anchor(anchors, &obs.anchor_a_id)?;
        let b = find_anchor(anchors, &obs.anchor_b_id)?;
        if a.id == b.id {
            return Err(LocateError::AnchorMismatch(a.id.clone(), b.id.clone()));
        }
        if !obs.delta_distance.is_finite() {
            return Err(LocateError::NonFinite);
        }
        let baseline = a.position.distance(b.position);
        if obs.delta_distance.abs() > baseline + FEASIBILITY_SLACK {
            return Err(LocateError::InfeasibleRangeDifference {
                a: a.id.clone(),
                b: b.id.clone(),
                k: obs.delta_distance,
                baseline,
            });
        }
        let key = if a.id < b.id { (a.id.as_str(), b.id.as_str()) } else { (b.id.as_str(), a.id.as_str()) };
        if !keys.contains(&key) {
            keys.push(key);
        }
        for pos in [a.position, b.position] {
            if !used.contains(&pos) {
                used.push(pos);
            }
        }
        pairs.push(Pair { a: a.position, b: b.position, k: obs.delta_distance });
    }
    if keys.len() < 2 {
        return Err(LocateError::InsufficientObservations { needed: 2, got: keys.len() });
    }

    let centroid = used.iter().fold(Point2::ORIGIN, |acc, p| acc + *p) * (1.0 / used.len() as f64);
    let spread = used.iter().map(|p| p.distance(centroid)).fold(0.0, f64::max).max(1.0);
    let guess = initial_guess.unwrap_or(centroid);
    if !guess.is_finite() {
        return Err(LocateError::NonFinite);
    }

    let mut starts = alloc::vec![guess];
    for radius in [0.5, 2.0] {
        for k in 0..12 {
            let heading = TAU * (k as f64 + 0.5 * radius) / 12.0;
            starts.push(centroid + Point2::from_heading(heading) * (radius * spread));
        }
    }
    let runs: Vec<Descent> = starts.iter().map(|s| levenberg_marquardt(&pairs, *s, spread)).collect();

    let Some(best_cost) = runs.iter().filter(|r| r.converged).map(|r| r.cost).reduce(f64::min) else {
        let best = runs
            .iter()
            .reduce(|a, b| if b.cost < a.cost { b } else { a })
            .expect("at least one start");
        return Err(LocateError::NonConvergence { best: best.point, residual: best.cost });
    };
    let cutoff = best_cost + 1e-10 * (1.0 + best_cost) * spread * spread;
    let mut minima: Vec<(Point2, f64)> = Vec::new();
    for r in runs.iter().filter(|r| r.converged && r.cost <= cutoff) {
        if !minima.iter().any(|(m, _)| m.distance(r.point) <= SAME_POINT) {
            minima.push((r.point, r.cost));
        }
    }
    let (point, residual) = minima
        .iter()
        .copied()
        .reduce(|a, b| if b.0.distance(guess) < a.0.distance(guess) { b } else { a })
        .expect("best converged run is in the set");

    let mut est = PositionEstimate::new(point, Method::Tdoa, residual);
    if minima.len() > 1 {
        est.diagnostics.push(format!(
            "ambiguous: {} equally good intersections; returned the one nearest the initial guess",
            minima.len()
        ));
        for (m, _) in &minima {
            est.diagnostics.push(format!("candidate ({}, {})", m.x, m.y));
        }
    }
    Ok(est)
}
