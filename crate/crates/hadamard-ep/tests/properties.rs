//! Property-based tests for the geometric invariants: metric axioms,
//! geodesic comparison inequalities, quasi-linearization algebra, projection
//! characterization, and serialization round-trips.

use proptest::prelude::*;

use hadamard_ep::{ConvexSet, GeodesicParam, Point, SpaceHandle, SpaceKind, Tangent};

const TOL: f64 = 1e-9;

fn euclidean_point() -> impl Strategy<Value = Point> {
    prop::collection::vec(-5.0..5.0_f64, 3).prop_map(Point::euclidean)
}

fn hyperboloid_point() -> impl Strategy<Value = Point> {
    // Lift a bounded tangent vector at the apex onto the sheet.
    prop::collection::vec(-2.0..2.0_f64, 2).prop_map(|v| {
        let space = SpaceHandle::hyperboloid(2);
        space.exp_map(&space.basepoint(), &Tangent(vec![0.0, v[0], v[1]])).unwrap()
    })
}

fn star_tree_point() -> impl Strategy<Value = Point> {
    (0usize..4, 0.0..3.0_f64).prop_map(|(ray, r)| Point::star_tree(ray, r))
}

fn space_of(p: &Point) -> SpaceHandle {
    match p {
        Point::Euclidean { .. } => SpaceHandle::euclidean(3),
        Point::Hyperboloid { .. } => SpaceHandle::hyperboloid(2),
        Point::StarTree { .. } => SpaceHandle::star_tree(4),
    }
}

fn point_for(kind: usize) -> BoxedStrategy<Point> {
    match kind % 3 {
        0 => euclidean_point().boxed(),
        1 => hyperboloid_point().boxed(),
        _ => star_tree_point().boxed(),
    }
}

/// (kind, points...) strategies keeping all points in one space.
fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
    (0usize..3).prop_flat_map(|k| (point_for(k), point_for(k), point_for(k)))
}

fn quadruple() -> impl Strategy<Value = (Point, Point, Point, Point)> {
    (0usize..3).prop_flat_map(|k| (point_for(k), point_for(k), point_for(k), point_for(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms((x, y, z) in triple()) {
        let s = space_of(&x);
        let dxy = s.distance(&x, &y).unwrap();
        let dyx = s.distance(&y, &x).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - dyx).abs() <= TOL);
        prop_assert!(s.distance(&x, &x).unwrap() <= 1e-12);
        let dxz = s.distance(&x, &z).unwrap();
        let dyz = s.distance(&y, &z).unwrap();
        prop_assert!(dxz <= dxy + dyz + TOL);
    }

    #[test]
    fn geodesic_splits_distance((x, y) in (0usize..3).prop_flat_map(|k| (point_for(k), point_for(k))), t in 0.0..1.0_f64) {
        let s = space_of(&x);
        let g = s.geodesic_point(&x, &y, GeodesicParam::new(t)).unwrap();
        // Outputs stay valid members of the space (hyperboloid points stay
        // on the sheet, tree origins stay canonical).
        s.validate_point(&g).unwrap();
        let d = s.distance(&x, &y).unwrap();
        prop_assert!((s.distance(&x, &g).unwrap() - t * d).abs() <= TOL);
        prop_assert!((s.distance(&y, &g).unwrap() - (1.0 - t) * d).abs() <= TOL);
    }

    #[test]
    fn convex_sets_are_closed_under_geodesics(
        (c, a, b) in triple(),
        r in 0.3..2.0_f64,
        draws in prop::collection::vec((0.0..1.0_f64, 0.0..1.0_f64, 0.0..1.0_f64), 8),
    ) {
        let s = space_of(&c);
        let mut sets = vec![
            ConvexSet::WholeSpace,
            ConvexSet::Ball { center: c.clone(), radius: r },
        ];
        if s.distance(&a, &b).unwrap() > 1e-6 {
            sets.push(ConvexSet::Segment { a: a.clone(), b: b.clone() });
        }
        if matches!(s.kind(), SpaceKind::StarTree { .. }) {
            sets.push(ConvexSet::Subtree { rays: vec![0, 2], cap: Some(r) });
        }
        for set in &sets {
            for (t1, t2, t3) in &draws {
                // Two members via projection of scaled copies of the sample
                // points, then a geodesic point between them.
                let p = s.project(set, &s.geodesic_point(&a, &c, GeodesicParam::new(*t1)).unwrap()).unwrap();
                let q = s.project(set, &s.geodesic_point(&b, &c, GeodesicParam::new(*t2)).unwrap()).unwrap();
                let mid = s.geodesic_point(&p, &q, GeodesicParam::new(*t3)).unwrap();
                prop_assert!(s.contains(set, &mid).unwrap(), "{set:?} not closed under geodesics");
            }
        }
    }

    #[test]
    fn geodesic_comparison_family((x, y, z) in triple(), t in 0.0..1.0_f64, u in 0.0..1.0_f64) {
        let s = space_of(&x);
        let g = |p: &Point, q: &Point, w: f64| s.geodesic_point(p, q, GeodesicParam::new(w)).unwrap();
        let d = |p: &Point, q: &Point| s.distance(p, q).unwrap();
        // Convexity of the distance to a fixed point.
        prop_assert!(d(&g(&x, &y, t), &z) <= (1.0 - t) * d(&x, &z) + t * d(&y, &z) + TOL);
        // Constant-speed parametrization.
        prop_assert!((d(&g(&x, &y, t), &g(&x, &y, u)) - (t - u).abs() * d(&x, &y)).abs() <= TOL);
        // Contraction of geodesics from a common endpoint.
        prop_assert!(d(&g(&z, &x, t), &g(&z, &y, t)) <= t * d(&x, &y) + TOL);
        // Squared comparison inequality.
        prop_assert!(s.check_cat0_inequality(&x, &y, &z, GeodesicParam::new(t)).unwrap() >= -TOL);
    }

    #[test]
    fn flat_space_comparison_is_equality(
        xs in prop::collection::vec(-5.0..5.0_f64, 9),
        t in 0.0..1.0_f64,
    ) {
        let s = SpaceHandle::euclidean(3);
        let x = Point::euclidean(xs[0..3].to_vec());
        let y = Point::euclidean(xs[3..6].to_vec());
        let z = Point::euclidean(xs[6..9].to_vec());
        let defect = s.check_cat0_inequality(&x, &y, &z, GeodesicParam::new(t)).unwrap();
        prop_assert!(defect.abs() <= TOL);
    }

    #[test]
    fn quasilinearization_algebra((a, b, c, d) in quadruple()) {
        let s = space_of(&a);
        let q = |p1: &Point, p2: &Point, p3: &Point, p4: &Point| {
            s.quasilinearization(p1, p2, p3, p4).unwrap()
        };
        // Symmetry of the pairing, antisymmetry in the first vector,
        // splitting through an intermediate point, and the self-pairing.
        prop_assert!((q(&a, &b, &c, &d) - q(&c, &d, &a, &b)).abs() <= TOL);
        prop_assert!((q(&a, &b, &c, &d) + q(&b, &a, &c, &d)).abs() <= TOL);
        prop_assert!((q(&a, &c, &c, &d) + q(&c, &b, &c, &d) - q(&a, &b, &c, &d)).abs() <= TOL);
        let dist = s.distance(&a, &b).unwrap();
        prop_assert!((q(&a, &b, &a, &b) - dist * dist).abs() <= TOL);
        // Cauchy-Schwarz.
        prop_assert!(s.check_cauchy_schwarz(&a, &b, &c, &d).unwrap() >= -TOL);
    }

    #[test]
    fn projection_is_idempotent_and_characterized((x, c) in (0usize..3).prop_flat_map(|k| (point_for(k), point_for(k))), r in 0.2..2.0_f64) {
        let s = space_of(&x);
        let ball = ConvexSet::Ball { center: c.clone(), radius: r };
        let p = s.project(&ball, &x).unwrap();
        prop_assert!(s.contains(&ball, &p).unwrap());
        let pp = s.project(&ball, &p).unwrap();
        prop_assert!(s.distance(&p, &pp).unwrap() <= 1e-9);
        prop_assert!(s.distance(&x, &p).unwrap() <= s.distance(&x, &c).unwrap() + 1e-9);
    }

    #[test]
    fn log_exp_round_trip_on_manifolds((x, y) in (0usize..2).prop_flat_map(|k| (point_for(k), point_for(k)))) {
        let s = space_of(&x);
        let v = s.log_map(&x, &y).unwrap();
        let back = s.exp_map(&x, &v).unwrap();
        prop_assert!(s.distance(&back, &y).unwrap() <= 1e-8);
        prop_assert!((s.tangent_norm(&x, &v).unwrap() - s.distance(&x, &y).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn point_serialization_round_trips(p in (0usize..3).prop_flat_map(point_for)) {
        let json = serde_json::to_string(&p).unwrap();
        let back: Point = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &p);
        // Schema sanity: tagged by "kind".
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let kind = v["kind"].as_str().unwrap();
        let space = space_of(&p);
        match space.kind() {
            SpaceKind::Euclidean { .. } => prop_assert_eq!(kind, "euclidean"),
            SpaceKind::Hyperboloid { .. } => prop_assert_eq!(kind, "hyperboloid"),
            SpaceKind::StarTree { .. } => prop_assert_eq!(kind, "star_tree"),
        }
    }

    #[test]
    fn segment_projection_beats_every_sampled_member(
        (x, a, b) in triple(),
        probes in prop::collection::vec(0.0..1.0_f64, 16),
    ) {
        let s = space_of(&x);
        prop_assume!(s.distance(&a, &b).unwrap() > 1e-6);
        let seg = ConvexSet::Segment { a: a.clone(), b: b.clone() };
        let p = s.project(&seg, &x).unwrap();
        let dp = s.distance(&x, &p).unwrap();
        for t in probes {
            let y = s.geodesic_point(&a, &b, GeodesicParam::new(t)).unwrap();
            prop_assert!(dp <= s.distance(&x, &y).unwrap() + 1e-9);
            // Variational characterization of the projection.
            prop_assert!(s.quasilinearization(&p, &x, &p, &y).unwrap() <= 1e-8);
        }
    }
}
