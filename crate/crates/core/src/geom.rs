//! Planar geometry: points, walls, floor plans and ray casting.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::math;

/// Rays only register hits strictly further than this from their origin (m).
pub const HIT_TOLERANCE: f64 = 1e-9;

/// Offset applied along a re-launched ray to step off the wall it left (m).
pub const RELAUNCH_OFFSET: f64 = 1e-6;

/// Slack on the segment parameter so that endpoint hits are inclusive.
const SEGMENT_PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("direction vector has zero length")]
    ZeroDirection,
    #[error("map dimensions must be positive, got {width} x {height}")]
    InvalidDimensions { width: f64, height: f64 },
    #[error("obstruction `{id}`: relative permittivity {eps_r} is below 1")]
    InvalidPermittivity { id: String, eps_r: f64 },
    #[error("obstruction `{id}`: segment has zero length")]
    DegenerateObstruction { id: String },
    #[error("obstruction `{id}` lies outside the map bounds")]
    ObstructionOutOfBounds { id: String },
    #[error("duplicate obstruction id `{0}`")]
    DuplicateId(String),
}

/// A point (or displacement) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector with the given heading (radians, counter-clockwise from +x).
    pub fn from_heading(angle: f64) -> Self {
        Self::new(math::cos(angle), math::sin(angle))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Heading of this vector in `[0, 2π)`.
    pub fn heading(self) -> f64 {
        math::wrap_tau(math::atan2(self.y, self.x))
    }

    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A straight wall segment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self, GeomError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if a == b {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn direction(&self) -> Point2 {
        self.b - self.a
    }

    pub fn length(&self) -> f64 {
        self.direction().norm()
    }

    /// Unit normal (counter-clockwise from `a → b`).
    pub fn normal(&self) -> Point2 {
        self.direction().perp().normalized().unwrap_or(Point2::new(0.0, 1.0))
    }

    /// Mirror image of `p` across the infinite line through this segment.
    pub fn mirror(&self, p: Point2) -> Point2 {
        let n = self.normal();
        let off = (p - self.a).dot(n);
        p - n * (2.0 * off)
    }

    /// Perpendicular distance from `p` to the segment (clamped to its ends).
    pub fn distance_to(&self, p: Point2) -> f64 {
        let e = self.direction();
        let t = ((p - self.a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
        (self.a + e * t).distance(p)
    }
}

/// A wall with its relative permittivity.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub id: String,
    pub wall: Segment,
    pub eps_r: f64,
}

impl Obstruction {
    pub fn new(id: impl Into<String>, wall: Segment, eps_r: f64) -> Self {
        Self { id: id.into(), wall, eps_r }
    }
}

/// Rectangular floor plan `[0, width] × [0, height]` with interior walls.
///
/// The outer boundary absorbs every ray that reaches it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    width: f64,
    height: f64,
    obstructions: Vec<Obstruction>,
}

impl EnvironmentMap {
    pub fn new(width: f64, height: f64, obstructions: Vec<Obstruction>) -> Result<Self, GeomError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(GeomError::InvalidDimensions { width, height });
        }
        let env = Self { width, height, obstructions: Vec::new() };
        for (i, o) in obstructions.iter().enumerate() {
            if obstructions[..i].iter().any(|prev| prev.id == o.id) {
                return Err(GeomError::DuplicateId(o.id.clone()));
            }
            if !(o.eps_r >= 1.0 && o.eps_r.is_finite()) {
                return Err(GeomError::InvalidPermittivity { id: o.id.clone(), eps_r: o.eps_r });
            }
            if !o.wall.a.is_finite() || !o.wall.b.is_finite() {
                return Err(GeomError::NonFinite);
            }
            if o.wall.a == o.wall.b {
                return Err(GeomError::DegenerateObstruction { id: o.id.clone() });
            }
            if !env.contains(o.wall.a) || !env.contains(o.wall.b) {
                return Err(GeomError::ObstructionOutOfBounds { id: o.id.clone() });
            }
        }
        Ok(Self { obstructions, ..env })
    }

    /// A map with no interior walls.
    pub fn empty(width: f64, height: f64) -> Result<Self, GeomError> {
        Self::new(width, height, Vec::new())
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn obstructions(&self) -> &[Obstruction] {
        &self.obstructions
    }

    /// Whether `p` lies inside the map (boundary inclusive, 1e-9 m slack).
    pub fn contains(&self, p: Point2) -> bool {
        let tol = HIT_TOLERANCE;
        p.is_finite()
            && p.x >= -tol
            && p.y >= -tol
            && p.x <= self.width + tol
            && p.y <= self.height + tol
    }
}

/// Half-line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray2 {
    origin: Point2,
    direction: Point2,
}

impl Ray2 {
    /// Ray leaving `origin` at `heading` radians.
    pub fn from_heading(origin: Point2, heading: f64) -> Self {
        Self { origin, direction: Point2::from_heading(heading) }
    }

    /// Ray leaving `origin` along `direction` (normalized here).
    pub fn new(origin: Point2, direction: Point2) -> Result<Self, GeomError> {
        if !origin.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let direction = direction.normalized().ok_or(GeomError::ZeroDirection)?;
        Ok(Self { origin, direction })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn direction(&self) -> Point2 {
        self.direction
    }

    pub fn at(&self, s: f64) -> Point2 {
        self.origin + self.direction * s
    }
}

/// Where a ray met a wall segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentHit {
    pub point: Point2,
    /// Distance along the ray (m).
    pub distance: f64,
    /// Angle from the wall normal, in `[0, π/2]`.
    pub incidence_angle: f64,
    /// Position along the segment, `0` at `a` and `1` at `b`.
    pub segment_param: f64,
}

/// Nearest intersection of `ray` with `seg` strictly ahead of the ray origin.
///
/// Endpoints are inclusive. Rays parallel to (or collinear with) the segment
/// never hit it.
pub fn ray_segment_intersect(ray: &Ray2, seg: &Segment) -> Option<SegmentHit> {
    let d = ray.direction;
    let e = seg.direction();
    let denom = d.cross(e);
    if denom.abs() <= 1e-15 * e.norm() {
        return None;
    }
    let w = seg.a - ray.origin;
    let s = w.cross(e) / denom;
    let u = w.cross(d) / denom;
    if s <= HIT_TOLERANCE || !(-SEGMENT_PARAM_SLACK..=1.0 + SEGMENT_PARAM_SLACK).contains(&u) {
        return None;
    }
    let u = u.clamp(0.0, 1.0);
    Some(SegmentHit {
        point: seg.a + e * u,
        distance: s,
        incidence_angle: incidence(d, seg.normal()),
        segment_param: u,
    })
}

fn incidence(direction: Point2, normal: Point2) -> f64 {
    math::acos(direction.dot(normal).abs().min(1.0))
}

/// What a ray ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitTarget {
    /// Index into [`EnvironmentMap::obstructions`].
    Wall(usize),
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionHit {
    pub target: HitTarget,
    pub point: Point2,
    pub distance: f64,
    pub incidence_angle: f64,
}

/// First wall (or the map boundary) met by `ray`.
///
/// Hits within [`HIT_TOLERANCE`] of each other count as ties; the wall with
/// the lowest id wins, and any wall wins over the boundary.
pub fn first_obstruction(ray: &Ray2, env: &EnvironmentMap) -> Option<ObstructionHit> {
    let mut best: Option<(usize, SegmentHit)> = None;
    for (i, obs) in env.obstructions.iter().enumerate() {
        let Some(hit) = ray_segment_intersect(ray, &obs.wall) else {
            continue;
        };
        best = match best {
            None => Some((i, hit)),
            Some((j, prev)) => {
                let closer = hit.distance < prev.distance - HIT_TOLERANCE;
                let tie = (hit.distance - prev.distance).abs() <= HIT_TOLERANCE;
                if closer || (tie && obs.id < env.obstructions[j].id) {
                    Some((i, hit))
                } else {
                    Some((j, prev))
                }
            }
        };
    }
    let boundary = boundary_exit(ray, env);
    match (best, boundary) {
        (Some((_, hit)), Some(b)) if b.distance < hit.distance - HIT_TOLERANCE => Some(b),
        (Some((i, hit)), _) => Some(ObstructionHit {
            target: HitTarget::Wall(i),
            point: hit.point,
            distance: hit.distance,
            incidence_angle: hit.incidence_angle,
        }),
        (None, b) => b,
    }
}

fn boundary_exit(ray: &Ray2, env: &EnvironmentMap) -> Option<ObstructionHit> {
    let o = ray.origin;
    let d = ray.direction;
    let mut exit = f64::INFINITY;
    let mut normal = Point2::new(1.0, 0.0);
    if d.x > 0.0 {
        exit = (env.width - o.x) / d.x;
    } else if d.x < 0.0 {
        exit = -o.x / d.x;
    }
    let sy = if d.y > 0.0 {
        (env.height - o.y) / d.y
    } else if d.y < 0.0 {
        -o.y / d.y
    } else {
        f64::INFINITY
    };
    if sy < exit {
        exit = sy;
        normal = Point2::new(0.0, 1.0);
    }
    if !(exit.is_finite() && exit > HIT_TOLERANCE) {
        return None;
    }
    Some(ObstructionHit {
        target: HitTarget::Boundary,
        point: ray.at(exit),
        distance: exit,
        incidence_angle: incidence(d, normal),
    })
}
