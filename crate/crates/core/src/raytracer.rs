//! Brute-force 2-D ray launcher.
//!
//! Rays leave the transmitter at `n_rays` evenly spaced azimuths, and a second
//! fan leaves the receiver the same way. Each time a
//! ray meets a wall it splits into a specular reflection and a straight-through
//! transmission, each attenuated by the Fresnel power fractions of that wall.
//! A ray is received when it passes within the detection sphere of the other
//! end. Sequences found from the receiver side are reversed, so the set of
//! candidates (and therefore the result) is unchanged when tx and rx swap.
//! Every received interaction sequence is then resolved exactly with
//! the image method, so the reported geometry is specular to machine precision
//! and does not depend on which launched ray happened to find it.
//!
//! The direct path (including any walls it crosses) is added from a straight
//! tx→rx walk, and every one-bounce path from the image of tx in each wall, so
//! neither depends on launch angles. A short wall near a ray-tube edge would
//! otherwise hide its specular point from a 100-ray fan.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use thiserror::Error;

use crate::channel::{fresnel_power, CiPathLossModel, FrequencyBand, REFERENCE_DISTANCE, SPEED_OF_LIGHT};
use crate::geom::{
    first_obstruction, ray_segment_intersect, EnvironmentMap, HitTarget, Point2, Ray2, HIT_TOLERANCE,
    RELAUNCH_OFFSET,
};
use crate::math;

/// PDP bins weaker than this are not reported (dBm).
pub const PDP_NOISE_FLOOR_DBM: f64 = -200.0;

/// Slack used when validating resolved path legs against other walls (m).
const LEG_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("transmitter ({0:?}) is outside the map")]
    TxOutOfBounds(Point2),
    #[error("receiver ({0:?}) is outside the map")]
    RxOutOfBounds(Point2),
    #[error("transmitter and receiver coincide")]
    Coincident,
    #[error("at least 3 rays are required, got {0}")]
    TooFewRays(usize),
    #[error("cannot build a power delay profile without paths")]
    EmptyPaths,
}

/// How the receiver's detection sphere is sized.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DetectionMode {
    /// Half the arc between adjacent launch angles at the unfolded length.
    UnfoldedArc,
    /// A constant radius in meters.
    FixedRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceConfig {
    pub n_rays: usize,
    pub max_interactions: usize,
    /// Rays whose cumulative gain drops below this are abandoned (dB).
    pub min_path_gain_db: f64,
    pub detection: DetectionMode,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            n_rays: 100,
            max_interactions: 4,
            min_path_gain_db: -180.0,
            detection: DetectionMode::UnfoldedArc,
        }
    }
}

impl TraceConfig {
    fn radius(&self, length: f64) -> f64 {
        match self.detection {
            DetectionMode::UnfoldedArc => detection_radius(length, self.n_rays),
            DetectionMode::FixedRadius(r) => r,
        }
    }
}

/// Detection sphere radius `π·L / n_rays`.
pub fn detection_radius(path_length: f64, n_rays: usize) -> f64 {
    PI * path_length / n_rays as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InteractionKind {
    Reflection,
    Transmission,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interaction {
    pub kind: InteractionKind,
    pub point: Point2,
    pub obstruction_id: String,
    pub incidence_angle: f64,
    pub power_loss_db: f64,
}

/// One multipath component from tx to rx.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RayPath {
    pub tx: Point2,
    pub rx: Point2,
    /// `tx`, every interaction point in order, then `rx`.
    pub vertices: Vec<Point2>,
    pub interactions: Vec<Interaction>,
    pub total_length: f64,
    pub delay: f64,
    pub path_gain_db: f64,
    /// Direction from the rx back along the arriving leg, `[0, 2π)`.
    pub aoa_at_rx: f64,
    /// Direction of the departing leg at the tx, `[0, 2π)`.
    pub aod_at_tx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PdpBin {
    pub index: u64,
    /// Start of the bin (s).
    pub delay: f64,
    pub power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerDelayProfile {
    pub bin_width: f64,
    /// Non-empty bins ordered by delay.
    pub bins: Vec<PdpBin>,
    pub peak_power_dbm: f64,
    pub first_arrival_delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelPrediction {
    /// Ordered by delay, then by decreasing gain.
    pub paths: Vec<RayPath>,
    pub pdp: Option<PowerDelayProfile>,
    pub total_rx_power_dbm: Option<f64>,
    pub strongest_aoa: Option<f64>,
    pub strongest_toa: Option<f64>,
}

impl ChannelPrediction {
    /// The path with maximal gain (earliest on ties).
    pub fn strongest(&self) -> Option<&RayPath> {
        self.paths.iter().reduce(|best, p| if p.path_gain_db > best.path_gain_db { p } else { best })
    }
}

type Step = (usize, InteractionKind);

struct Tracer<'a> {
    env: &'a EnvironmentMap,
    tx: Point2,
    rx: Point2,
    model: &'a CiPathLossModel,
    cfg: &'a TraceConfig,
    found: BTreeSet<Vec<Step>>,
    /// The current fan was launched from `rx` toward `tx`.
    from_rx: bool,
}

/// Predicts the multipath channel between `tx` and `rx`.
pub fn trace(
    env: &EnvironmentMap,
    tx: Point2,
    rx: Point2,
    tx_power_dbm: f64,
    band: &FrequencyBand,
    model: &CiPathLossModel,
    cfg: &TraceConfig,
) -> Result<ChannelPrediction, TraceError> {
    if !env.contains(tx) {
        return Err(TraceError::TxOutOfBounds(tx));
    }
    if !env.contains(rx) {
        return Err(TraceError::RxOutOfBounds(rx));
    }
    if tx == rx {
        return Err(TraceError::Coincident);
    }
    if cfg.n_rays < 3 {
        return Err(TraceError::TooFewRays(cfg.n_rays));
    }

    let mut tracer = Tracer { env, tx, rx, model, cfg, found: BTreeSet::new(), from_rx: false };
    let direct = tracer.direct_steps();
    if direct.len() <= cfg.max_interactions {
        tracer.found.insert(direct);
    }
    for seq in tracer.single_bounce_steps() {
        tracer.found.insert(seq);
    }
    let mut steps = Vec::with_capacity(cfg.max_interactions);
    for (origin, from_rx) in [(tx, false), (rx, true)] {
        tracer.from_rx = from_rx;
        for k in 0..cfg.n_rays {
            let heading = 2.0 * PI * k as f64 / cfg.n_rays as f64;
            tracer.propagate(Ray2::from_heading(origin, heading), 0.0, 0.0, &mut steps);
        }
    }

    let mut paths: Vec<RayPath> = tracer
        .found
        .iter()
        .filter_map(|seq| tracer.resolve(seq))
        .filter(|p| p.path_gain_db >= cfg.min_path_gain_db)
        .collect();
    paths.sort_by(|a, b| {
        a.delay
            .partial_cmp(&b.delay)
            .unwrap_or(Ordering::Equal)
            .then(b.path_gain_db.partial_cmp(&a.path_gain_db).unwrap_or(Ordering::Equal))
    });

    let total_rx_power_dbm = math::db_sum(paths.iter().map(|p| tx_power_dbm + p.path_gain_db));
    let pdp = build_pdp(&paths, band, tx_power_dbm).ok();
    let mut prediction = ChannelPrediction {
        paths,
        pdp,
        total_rx_power_dbm,
        strongest_aoa: None,
        strongest_toa: None,
    };
    if let Some((aoa, toa)) = prediction.strongest().map(|p| (p.aoa_at_rx, p.delay)) {
        prediction.strongest_aoa = Some(aoa);
        prediction.strongest_toa = Some(toa);
    }
    Ok(prediction)
}

impl Tracer<'_> {
    fn gain_db(&self, length: f64, loss_db: f64) -> f64 {
        let d = length.max(REFERENCE_DISTANCE);
        let pl = self.model.path_loss(d).unwrap_or(f64::INFINITY);
        -pl - loss_db
    }

    /// Walls crossed by the straight tx→rx segment, nearest first.
    fn direct_steps(&self) -> Vec<Step> {
        self.crossings(self.tx, self.rx, None)
    }

    /// Transmissions met on the straight segment `from → to`, nearest first,
    /// ignoring wall `skip`.
    fn crossings(&self, from: Point2, to: Point2, skip: Option<usize>) -> Vec<Step> {
        let leg = to - from;
        let len = leg.norm();
        let Ok(ray) = Ray2::new(from, leg) else {
            return Vec::new();
        };
        let obstructions = self.env.obstructions();
        let mut crossed: Vec<(f64, usize)> = obstructions
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .filter_map(|(i, o)| {
                ray_segment_intersect(&ray, &o.wall)
                    .filter(|h| h.distance < len - HIT_TOLERANCE)
                    .map(|h| (h.distance, i))
            })
            .collect();
        crossed.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| obstructions[a.1].id.cmp(&obstructions[b.1].id))
        });
        crossed.into_iter().map(|(_, i)| (i, InteractionKind::Transmission)).collect()
    }

    /// One-bounce sequences from the image of tx in every wall, with the walls
    /// each leg passes through. Like the direct path, these never depend on
    /// launch angles.
    fn single_bounce_steps(&self) -> Vec<Vec<Step>> {
        let mut out = Vec::new();
        for (i, o) in self.env.obstructions().iter().enumerate() {
            let image = o.wall.mirror(self.tx);
            let Some(q) = line_through_wall(image, self.rx, &o.wall) else {
                continue;
            };
            let mut seq = self.crossings(self.tx, q, Some(i));
            seq.push((i, InteractionKind::Reflection));
            seq.extend(self.crossings(q, self.rx, Some(i)));
            if seq.len() <= self.cfg.max_interactions {
                out.push(seq);
            }
        }
        out
    }

    /// Follows one ray until it dies, recording every interaction sequence that
    /// reaches the receiver.
    fn propagate(&mut self, ray: Ray2, length: f64, loss_db: f64, steps: &mut Vec<Step>) {
        let Some(hit) = first_obstruction(&ray, self.env) else {
            return;
        };

        let d = ray.direction();
        let target = if self.from_rx { self.tx } else { self.rx };
        let along = (target - ray.origin()).dot(d);
        if along > HIT_TOLERANCE && along <= hit.distance {
            let miss = ray.at(along).distance(target);
            if miss <= self.cfg.radius(length + along) {
                let mut seq = steps.clone();
                if self.from_rx {
                    seq.reverse();
                }
                self.found.insert(seq);
            }
        }

        let HitTarget::Wall(wall_idx) = hit.target else {
            return;
        };
        if steps.len() >= self.cfg.max_interactions {
            return;
        }
        let wall = &self.env.obstructions()[wall_idx];
        let fresnel = fresnel_power(hit.incidence_angle, wall.eps_r);
        let reached = length + hit.distance;

        let n = wall.wall.normal();
        let reflected = d - n * (2.0 * d.dot(n));
        let branches = [
            (InteractionKind::Reflection, reflected, fresnel.reflection_loss_db()),
            (InteractionKind::Transmission, d, fresnel.transmission_loss_db()),
        ];
        for (kind, dir, loss) in branches {
            let total_loss = loss_db + loss;
            if !(self.gain_db(reached, total_loss) >= self.cfg.min_path_gain_db) {
                continue;
            }
            let Ok(next) = Ray2::new(hit.point + dir * RELAUNCH_OFFSET, dir) else {
                continue;
            };
            steps.push((wall_idx, kind));
            self.propagate(next, reached + RELAUNCH_OFFSET, total_loss, steps);
            steps.pop();
        }
    }

    /// Exact geometry of an interaction sequence by the image method, or
    /// `None` if the sequence is not physically realizable.
    fn resolve(&self, seq: &[Step]) -> Option<RayPath> {
        let walls = self.env.obstructions();
        let mut images = Vec::with_capacity(seq.len());
        let mut src = self.tx;
        for &(i, kind) in seq {
            if kind == InteractionKind::Reflection {
                src = walls[i].wall.mirror(src);
            }
            images.push(src);
        }

        let mut vertices = vec![self.rx];
        let mut target = self.rx;
        for (k, &(i, _)) in seq.iter().enumerate().rev() {
            let q = line_through_wall(images[k], target, &walls[i].wall)?;
            vertices.push(q);
            target = q;
        }
        vertices.push(self.tx);
        vertices.reverse();

        // Side tests: reflections stay on one side, transmissions cross.
        for (k, &(i, kind)) in seq.iter().enumerate() {
            let w = &walls[i].wall;
            let n = w.normal();
            let before = (vertices[k] - w.a).dot(n);
            let after = (vertices[k + 2] - w.a).dot(n);
            let ok = match kind {
                InteractionKind::Reflection => before * after > 0.0,
                InteractionKind::Transmission => before * after < 0.0,
            };
            if !ok {
                return None;
            }
        }

        // No leg may touch a wall other than at its end vertices.
        for leg in vertices.windows(2) {
            let len = leg[0].distance(leg[1]);
            if len <= HIT_TOLERANCE {
                return None;
            }
            let ray = Ray2::new(leg[0], leg[1] - leg[0]).ok()?;
            let blocked = walls.iter().any(|o| {
                ray_segment_intersect(&ray, &o.wall)
                    .is_some_and(|h| h.distance > LEG_TOLERANCE && h.distance < len - LEG_TOLERANCE)
            });
            if blocked {
                return None;
            }
        }

        let mut interactions = Vec::with_capacity(seq.len());
        let mut loss_total = 0.0;
        for (k, &(i, kind)) in seq.iter().enumerate() {
            let o = &walls[i];
            let incoming = (vertices[k + 1] - vertices[k]).normalized()?;
            let incidence = math::acos(incoming.dot(o.wall.normal()).abs().min(1.0));
            let fresnel = fresnel_power(incidence, o.eps_r);
            let loss = match kind {
                InteractionKind::Reflection => fresnel.reflection_loss_db(),
                InteractionKind::Transmission => fresnel.transmission_loss_db(),
            };
            loss_total += loss;
            interactions.push(Interaction {
                kind,
                point: vertices[k + 1],
                obstruction_id: o.id.clone(),
                incidence_angle: incidence,
                power_loss_db: loss,
            });
        }

        let total_length: f64 = vertices.windows(2).map(|w| w[0].distance(w[1])).sum();
        let last = vertices[vertices.len() - 2];
        Some(RayPath {
            tx: self.tx,
            rx: self.rx,
            aoa_at_rx: (last - self.rx).heading(),
            aod_at_tx: (vertices[1] - self.tx).heading(),
            interactions,
            total_length,
            delay: total_length / SPEED_OF_LIGHT,
            path_gain_db: self.gain_db(total_length, loss_total),
            vertices,
        })
    }
}

/// Point where the segment `from → to` crosses the wall, if it does so
/// strictly between its ends and within the wall's extent.
fn line_through_wall(from: Point2, to: Point2, wall: &crate::geom::Segment) -> Option<Point2> {
    let d = to - from;
    let e = wall.direction();
    let denom = d.cross(e);
    if denom.abs() <= 1e-15 * d.norm() * e.norm() {
        return None;
    }
    let w = wall.a - from;
    let lambda = w.cross(e) / denom;
    let u = w.cross(d) / denom;
    if !(lambda > 0.0 && lambda < 1.0) || !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    Some(wall.a + e * u.clamp(0.0, 1.0))
}

/// Bins path powers at the Nyquist spacing `1/B`, summing powers that share a
/// bin on a linear scale.
pub fn build_pdp(
    paths: &[RayPath],
    band: &FrequencyBand,
    tx_power_dbm: f64,
) -> Result<PowerDelayProfile, TraceError> {
    if paths.is_empty() {
        return Err(TraceError::EmptyPaths);
    }
    let bin_width = band.sample_period();
    let mut keyed: Vec<(u64, f64)> = paths
        .iter()
        .map(|p| ((math::floor(p.delay / bin_width)) as u64, tx_power_dbm + p.path_gain_db))
        .collect();
    keyed.sort_by_key(|k| k.0);

    let mut bins: Vec<PdpBin> = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let index = keyed[start].0;
        let end = start + keyed[start..].iter().take_while(|(i, _)| *i == index).count();
        let power = math::db_sum(keyed[start..end].iter().map(|(_, p)| *p));
        if let Some(power_dbm) = power.filter(|p| *p >= PDP_NOISE_FLOOR_DBM) {
            bins.push(PdpBin { index, delay: index as f64 * bin_width, power_dbm });
        }
        start = end;
    }
    let first = bins.first().ok_or(TraceError::EmptyPaths)?;
    let first_arrival_delay = first.delay;
    let peak_power_dbm = bins.iter().map(|b| b.power_dbm).fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerDelayProfile { bin_width, bins, peak_power_dbm, first_arrival_delay })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::fspl_ref;
    use crate::geom::{Obstruction, Segment};
    use alloc::vec;

    fn band() -> FrequencyBand {
        FrequencyBand::new(28e9, 800e6).unwrap()
    }

    fn model() -> CiPathLossModel {
        CiPathLossModel::new(1.7, 28e9).unwrap()
    }

    fn wall(id: &str, x1: f64, y1: f64, x2: f64, y2: f64) -> Obstruction {
        Obstruction::new(id, Segment::new(Point2::new(x1, y1), Point2::new(x2, y2)).unwrap(), 5.0)
    }

    #[test]
    fn detection_radius_values() {
        assert!((detection_radius(10.0, 100) - 0.314_159_265_358_979_3).abs() < 1e-15);
        assert!((detection_radius(100.0, 100) - PI).abs() < 1e-14);
        assert!(detection_radius(10.0, 1_000_000_000) < 1e-7);
    }

    #[test]
    fn free_space_single_path() {
        let env = EnvironmentMap::empty(35.0, 65.5).unwrap();
        let (tx, rx) = (Point2::new(1.0, 1.0), Point2::new(11.0, 1.0));
        let pred = trace(&env, tx, rx, 0.0, &band(), &model(), &TraceConfig::default()).unwrap();
        assert_eq!(pred.paths.len(), 1);
        let p = &pred.paths[0];
        assert!((p.total_length - 10.0).abs() < 1e-12);
        // 10 / c, mpmath
        assert!((p.delay * 1e9 - 33.356_409_519_815_2).abs() < 1e-9);
        assert_eq!(p.path_gain_db, -(fspl_ref(28e9) + 17.0));
        assert_eq!(pred.total_rx_power_dbm, Some(p.path_gain_db));
        assert!((pred.strongest_aoa.unwrap() - PI).abs() < 1e-12);
        assert!(p.aod_at_tx.abs() < 1e-12);
    }

    #[test]
    fn wall_behind_receiver_adds_reflection() {
        // rx 5 m in front of a wall perpendicular to the tx→rx line.
        let env = EnvironmentMap::new(40.0, 20.0, vec![wall("w", 15.0, 0.0, 15.0, 20.0)]).unwrap();
        let (tx, rx) = (Point2::new(0.5, 10.0), Point2::new(10.0, 10.0));
        let pred = trace(&env, tx, rx, 0.0, &band(), &model(), &TraceConfig::default()).unwrap();
        let refl: Vec<_> = pred.paths.iter().filter(|p| p.interactions.len() == 1).collect();
        assert_eq!(pred.paths[0].interactions.len(), 0);
        assert!((pred.paths[0].total_length - 9.5).abs() < 1e-12);
        assert_eq!(refl.len(), 1);
        let image = Segment::new(Point2::new(15.0, 0.0), Point2::new(15.0, 20.0)).unwrap().mirror(tx);
        assert!((refl[0].total_length - image.distance(rx)).abs() < 1e-9);
        assert!((refl[0].total_length - 19.5).abs() < 1e-9);
        assert_eq!(refl[0].interactions[0].kind, InteractionKind::Reflection);
    }

    #[test]
    fn depth_zero_keeps_only_direct() {
        let env = EnvironmentMap::new(40.0, 20.0, vec![wall("w", 15.0, 0.0, 15.0, 20.0)]).unwrap();
        let cfg = TraceConfig { max_interactions: 0, ..TraceConfig::default() };
        let pred = trace(&env, Point2::new(1.0, 10.0), Point2::new(10.0, 10.0), 0.0, &band(), &model(), &cfg)
            .unwrap();
        assert_eq!(pred.paths.len(), 1);
        assert!(pred.paths[0].interactions.is_empty());

        let blocked = trace(&env, Point2::new(1.0, 10.0), Point2::new(20.0, 10.0), 0.0, &band(), &model(), &cfg)
            .unwrap();
        assert!(blocked.paths.is_empty());
        assert!(blocked.pdp.is_none());
        assert!(blocked.strongest_aoa.is_none());
    }

    #[test]
    fn transmission_through_wall() {
        let env = EnvironmentMap::new(40.0, 20.0, vec![wall("w", 15.0, 0.0, 15.0, 20.0)]).unwrap();
        let cfg = TraceConfig { max_interactions: 1, ..TraceConfig::default() };
        let pred = trace(&env, Point2::new(1.0, 10.0), Point2::new(20.0, 10.0), 0.0, &band(), &model(), &cfg)
            .unwrap();
        let direct = &pred.paths[0];
        assert_eq!(direct.interactions.len(), 1);
        assert_eq!(direct.interactions[0].kind, InteractionKind::Transmission);
        let t = fresnel_power(0.0, 5.0).transmission_loss_db();
        let expected = -(model().path_loss(19.0).unwrap()) - t;
        assert!((direct.path_gain_db - expected).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_rejected() {
        let env = EnvironmentMap::empty(10.0, 10.0).unwrap();
        let cfg = TraceConfig::default();
        let r = trace(&env, Point2::new(-1.0, 1.0), Point2::new(1.0, 1.0), 0.0, &band(), &model(), &cfg);
        assert!(matches!(r, Err(TraceError::TxOutOfBounds(_))));
        let r = trace(&env, Point2::new(1.0, 1.0), Point2::new(1.0, 11.0), 0.0, &band(), &model(), &cfg);
        assert!(matches!(r, Err(TraceError::RxOutOfBounds(_))));
        let r = trace(&env, Point2::new(1.0, 1.0), Point2::new(1.0, 1.0), 0.0, &band(), &model(), &cfg);
        assert_eq!(r, Err(TraceError::Coincident));
    }

    fn path_with(delay: f64, gain: f64) -> RayPath {
        RayPath {
            tx: Point2::ORIGIN,
            rx: Point2::ORIGIN,
            vertices: Vec::new(),
            interactions: Vec::new(),
            total_length: delay * SPEED_OF_LIGHT,
            delay,
            path_gain_db: gain,
            aoa_at_rx: 0.0,
            aod_at_tx: 0.0,
        }
    }

    #[test]
    fn pdp_binning() {
        let b = FrequencyBand::new(28e9, 100e6).unwrap();
        let one = build_pdp(&[path_with(25e-9, -60.0)], &b, 0.0).unwrap();
        assert_eq!(one.bins.len(), 1);
        assert_eq!(one.bins[0].power_dbm, -60.0);
        assert_eq!(one.bins[0].index, 2);

        let two = build_pdp(&[path_with(25e-9, -60.0), path_with(26e-9, -60.0)], &b, 0.0).unwrap();
        assert_eq!(two.bins.len(), 1);
        assert!((two.bins[0].power_dbm - (-60.0 + 10.0 * 2f64.log10())).abs() < 1e-12);

        let apart = build_pdp(&[path_with(25e-9, -60.0), path_with(55e-9, -70.0)], &b, 0.0).unwrap();
        assert_eq!(apart.bins.len(), 2);
        assert!((apart.bins[1].delay - apart.bins[0].delay - 30e-9).abs() < 1e-18);
        assert_eq!(apart.peak_power_dbm, -60.0);

        assert_eq!(build_pdp(&[], &b, 0.0), Err(TraceError::EmptyPaths));
        let quiet = build_pdp(&[path_with(25e-9, -250.0)], &b, 0.0);
        assert_eq!(quiet, Err(TraceError::EmptyPaths));
    }
}
