use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s2r_core::geometry::{
    distance, distance_by_shooting, from_model, geodesic_point, normalize_point, to_model,
};
use s2r_core::packing::{density, max_radius, ConstraintSet, PackingConfig};
use s2r_core::symmetry::{build_point_group, orbit, FiberDirection, Isometry};
use s2r_core::{BallSpec, FiberedPoint, GeodesicParams, QuadratureConfig};

fn point() -> impl Strategy<Value = FiberedPoint> {
    (-PI..PI, -FRAC_PI_2..FRAC_PI_2, -3.0..3.0f64)
        .prop_map(|(phi, theta, t)| FiberedPoint::new(phi, theta, t))
}

fn isometry() -> impl Strategy<Value = Isometry> {
    (
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.0..PI,
        any::<bool>(),
        any::<bool>(),
        -4.0..4.0f64,
    )
        .prop_filter("axis must be nonzero", |(x, y, z, ..)| {
            x * x + y * y + z * z > 1e-3
        })
        .prop_map(|(x, y, z, angle, mirror, reverse, shift)| {
            let rot =
                Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(x, y, z)), angle);
            let flip = if mirror {
                Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
            } else {
                Matrix3::identity()
            };
            let dir = if reverse {
                FiberDirection::Reverse
            } else {
                FiberDirection::Preserve
            };
            Isometry::new(rot.matrix() * flip, dir, shift).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_axioms(a in point(), b in point(), c in point()) {
        let (ab, ba) = (distance(&a, &b), distance(&b, &a));
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(distance(&a, &a), 0.0);
        prop_assert!((ab - ba).abs() <= 1e-14);
        prop_assert!(ab <= distance(&a, &c) + distance(&c, &b) + 1e-12);
    }

    #[test]
    fn model_round_trip(p in point()) {
        let back = from_model(&to_model(&p)).unwrap();
        prop_assert!(distance(&back, &p) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn isometries_preserve_distance(a in point(), b in point(), g in isometry()) {
        let d = distance(&a, &b);
        let moved = distance(&g.apply(&a), &g.apply(&b));
        prop_assert!((d - moved).abs() <= 1e-10, "{} vs {}", d, moved);
    }

    #[test]
    fn composition_acts_on_the_right(p in point(), g in isometry(), h in isometry()) {
        let lhs = g.compose(&h).apply(&p);
        let rhs = h.apply(&g.apply(&p));
        prop_assert!(distance(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn geodesics_split_into_sphere_and_fibre(
        u in -PI..PI,
        v in -FRAC_PI_2..FRAC_PI_2,
        tau in 0.0..3.0f64,
    ) {
        // the sphere part moves tau·cos v along a great circle, the fibre part tau·sin v
        let end = from_model(&geodesic_point(&GeodesicParams { u, v, tau })).unwrap();
        let origin = FiberedPoint::new(0.0, 0.0, 0.0);
        prop_assert!((end.t - tau * v.sin()).abs() <= 1e-12);
        let arc = s2r_core::geometry::spherical_angle(&origin, &end);
        prop_assert!((arc - tau * v.cos()).abs() <= 1e-10);
        prop_assert!((distance(&origin, &end) - tau).abs() <= 1e-10);
    }

    #[test]
    fn normalization_keeps_the_point(phi in -10.0..10.0f64, theta in -3.0..3.0f64, t in -2.0..2.0f64) {
        let raw = FiberedPoint::new(phi, theta, t);
        let n = normalize_point(raw).unwrap();
        prop_assert!(n.phi > -PI && n.phi <= PI);
        prop_assert!(n.theta.abs() <= FRAC_PI_2);
        prop_assert!((to_model(&raw).as_vector() - to_model(&n).as_vector()).norm() <= 1e-12 * (1.0 + t.exp()));
    }

    #[test]
    fn packings_are_feasible(s in 0.0..1.0f64, u in 0.0..1.0f64, tau in 0.05..3.0f64) {
        let k = FiberedPoint::new(s * FRAC_PI_2, u * FRAC_PI_2, 0.0);
        let cfg = PackingConfig::new(2, k, tau).unwrap();
        let (r, binding) = max_radius(&cfg).unwrap();
        prop_assert!(!binding.is_empty());
        for p in orbit(cfg.group(), cfg.kernel(), cfg.search_window()).unwrap() {
            let d = distance(&p.point, cfg.kernel());
            prop_assert!(d <= 1e-10 || d >= 2.0 * r - 1e-9);
        }
        let cs = ConstraintSet::new(2, &k).unwrap();
        prop_assert!((cs.radius(tau) - r).abs() <= 1e-12);
    }
}

#[test]
fn shooting_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut draw = || {
            FiberedPoint::new(
                rng.gen_range(-PI..PI),
                rng.gen_range(-FRAC_PI_2..FRAC_PI_2),
                rng.gen_range(-2.0..2.0),
            )
        };
        let (a, b) = (draw(), draw());
        let shot = distance_by_shooting(&a, &b).unwrap();
        assert_abs_diff_eq!(shot, distance(&a, &b), epsilon = 1e-9);
    }
}

#[test]
fn point_group_orders() {
    for q in 2..=8 {
        assert_eq!(build_point_group(q).unwrap().order(), 4 * q as usize);
    }
}

#[test]
fn density_ordering_of_reference_configurations() {
    let quad = QuadratureConfig::default();
    let at = |phi: f64, theta: f64, tau: f64| {
        density(
            &PackingConfig::new(2, FiberedPoint::new(phi, theta, 0.0), tau)
                .unwrap()
                .with_quadrature(quad),
        )
        .unwrap()
        .density
    };
    let d1 = at(PI / 4.0, 0.55737781, 0.64360446);
    let d2 = at(PI / 4.0, 0.0, FRAC_PI_2);
    let d3 = at(FRAC_PI_2, 0.0, PI);
    let d4 = at(0.0, FRAC_PI_2, PI / 3f64.sqrt());
    assert!(d4 > d3 && d3 > d1 && d1 > d2, "{d4} {d3} {d1} {d2}");
}

#[test]
fn ball_spec_round_trips_through_json() {
    let b = BallSpec::new(1.25).unwrap();
    let text = serde_json::to_string(&b).unwrap();
    assert_eq!(text, "1.25");
    assert_eq!(serde_json::from_str::<BallSpec>(&text).unwrap(), b);
    assert!(serde_json::from_str::<BallSpec>("3.5").is_err());
}
