use std::f64::consts::{FRAC_PI_2, TAU};

use mmloc_core::geom::{first_obstruction, ray_segment_intersect, HitTarget, HIT_TOLERANCE};
use mmloc_core::{EnvironmentMap, Obstruction, Point2, Ray2, Segment};
use proptest::prelude::*;

fn point(w: f64, h: f64) -> impl Strategy<Value = Point2> {
    (0.0..w, 0.0..h).prop_map(|(x, y)| Point2::new(x, y))
}

fn segment(w: f64, h: f64) -> impl Strategy<Value = Segment> {
    (point(w, h), point(w, h))
        .prop_filter("non-degenerate", |(a, b)| a.distance(*b) > 0.1)
        .prop_map(|(a, b)| Segment::new(a, b).unwrap())
}

proptest! {
    #[test]
    fn hit_lies_on_ray_and_segment(origin in point(50.0, 50.0), heading in 0.0..TAU, seg in segment(50.0, 50.0)) {
        let ray = Ray2::from_heading(origin, heading);
        if let Some(hit) = ray_segment_intersect(&ray, &seg) {
            prop_assert!(hit.distance > 0.0);
            prop_assert!(ray.at(hit.distance).distance(hit.point) <= 1e-9);
            prop_assert!((0.0..=1.0).contains(&hit.segment_param));
            prop_assert!(seg.distance_to(hit.point) <= 1e-9);
            prop_assert!((0.0..=FRAC_PI_2).contains(&hit.incidence_angle));
        }
    }

    #[test]
    fn crossing_segments_are_found(a in point(50.0, 50.0), b in point(50.0, 50.0), t in 0.05..0.95f64, side in 0.5..20.0f64) {
        // a ray aimed at an interior point of the segment from off its line hits it there
        prop_assume!(a.distance(b) > 1.0);
        let seg = Segment::new(a, b).unwrap();
        let target = a + (b - a) * t;
        let origin = target + seg.normal() * side + seg.direction() * 0.3;
        let ray = Ray2::new(origin, target - origin).unwrap();
        let hit = ray_segment_intersect(&ray, &seg).expect("aimed ray hits");
        prop_assert!(hit.point.distance(target) <= 1e-9);
        prop_assert!((hit.distance - origin.distance(target)).abs() <= 1e-9);
    }

    #[test]
    fn first_obstruction_is_nearest(
        origin in point(40.0, 30.0),
        heading in 0.0..TAU,
        segs in prop::collection::vec(segment(40.0, 30.0), 0..6),
    ) {
        let walls: Vec<Obstruction> =
            segs.iter().enumerate().map(|(i, s)| Obstruction::new(format!("w{i}"), *s, 4.0)).collect();
        let env = EnvironmentMap::new(40.0, 30.0, walls).unwrap();
        let ray = Ray2::from_heading(origin, heading);
        let hit = first_obstruction(&ray, &env).expect("the boundary always stops a ray");
        prop_assert!((0.0..=FRAC_PI_2).contains(&hit.incidence_angle));
        for o in env.obstructions() {
            if let Some(h) = ray_segment_intersect(&ray, &o.wall) {
                prop_assert!(hit.distance <= h.distance + HIT_TOLERANCE);
            }
        }
        match hit.target {
            HitTarget::Wall(i) => {
                let own = ray_segment_intersect(&ray, &env.obstructions()[i].wall).unwrap();
                prop_assert_eq!(own.distance, hit.distance);
            }
            HitTarget::Boundary => {
                let p = hit.point;
                let on_edge = [p.x, 40.0 - p.x, p.y, 30.0 - p.y].iter().any(|d| d.abs() <= 1e-9);
                prop_assert!(on_edge, "{:?}", p);
            }
        }
    }

    #[test]
    fn mirror_is_an_involution(p in point(50.0, 50.0), seg in segment(50.0, 50.0)) {
        let m = seg.mirror(p);
        prop_assert!(seg.mirror(m).distance(p) <= 1e-9);
        // the wall line bisects p and its image
        let mid = (p + m) * 0.5;
        prop_assert!((mid - seg.a).cross(seg.direction()).abs() <= 1e-9 * seg.length().max(1.0));
    }
}
