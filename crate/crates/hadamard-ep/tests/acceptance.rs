//! End-to-end acceptance suite. Each test pins one contract of the library
//! at its stated tolerance and prints a PASS line; run with
//! `cargo test --test acceptance -- --nocapture` to see the summary.

use std::time::Instant;

use hadamard_ep::bifunctions::{check_property, BifunctionProperty, CheckConfig};
use hadamard_ep::resolvent::{
    check_firmly_nonexpansive, residual, resolvent_path, solve_resolvent, FirmCheckConfig,
    ResolventRequest,
};
use hadamard_ep::solvers::{
    fejer_report, path_trace, run_halpern, run_ppa, ResolventDefaults, Schedule, SolveConfig,
};
use hadamard_ep::spaces::{run_space_sweep, SpaceSweepConfig};
use hadamard_ep::{
    Bifunction, ConvexSet, ExecMode, GeodesicParam, Point, SpaceHandle, Strategy, Tangent,
};

fn e1(x: f64) -> Point {
    Point::euclidean(vec![x])
}

fn e2(x: f64, y: f64) -> Point {
    Point::euclidean(vec![x, y])
}

fn h2(x: f64, y: f64) -> Point {
    let space = SpaceHandle::hyperboloid(2);
    space.exp_map(&space.basepoint(), &Tangent(vec![0.0, x, y])).unwrap()
}

#[test]
fn a01_geometry_axiom_sweeps() {
    let started = Instant::now();
    let spaces =
        [SpaceHandle::euclidean(3), SpaceHandle::hyperboloid(2), SpaceHandle::star_tree(5)];
    for space in &spaces {
        let cfg = SpaceSweepConfig { samples: 10_000, seed: 2024, ..SpaceSweepConfig::default() };
        let report = run_space_sweep(space, &cfg).unwrap();
        for check in &report.checks {
            assert!(
                check.worst_violation <= 1e-9,
                "{:?} / {:?}: worst violation {}",
                space.kind(),
                check.check,
                check.worst_violation
            );
        }
        assert!(report.passed);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "sweeps took {elapsed:?}");
    println!("[PASS] geometry axioms: 3 spaces x 10^4 samples within 1e-9 in {elapsed:?}");
}

#[test]
fn a02_resolvent_matches_grid_oracle() {
    let started = Instant::now();
    let instances: Vec<(SpaceHandle, Point, Point)> = vec![
        (SpaceHandle::euclidean(3), Point::euclidean(vec![0.9, -0.3, 0.2]), Point::euclidean(vec![-0.4, 0.5, 0.0])),
        (SpaceHandle::hyperboloid(2), h2(0.8, -0.4), h2(-0.3, 0.5)),
        (SpaceHandle::star_tree(3), Point::star_tree(0, 0.8), Point::star_tree(1, 0.5)),
    ];
    for (space, x_bar, a) in &instances {
        let f = Bifunction::half_sq_dist(*space, a.clone());
        let phi = |p: &Point| {
            let d = space.distance(p, a).unwrap();
            0.5 * d * d
        };
        for lambda in [0.25, 1.0, 4.0] {
            // Independent oracle: a 10^5-point grid along the geodesic from
            // the anchor to the potential's target, where the minimizer of
            // phi + (lambda/2) d^2(., x_bar) provably lives.
            let mut oracle = (f64::INFINITY, x_bar.clone());
            for i in 0..=100_000u32 {
                let t = i as f64 / 100_000.0;
                let g = space.geodesic_point(x_bar, a, GeodesicParam::new(t)).unwrap();
                let d = space.distance(&g, x_bar).unwrap();
                let val = phi(&g) + 0.5 * lambda * d * d;
                if val < oracle.0 {
                    oracle = (val, g);
                }
            }
            for strategy in [Strategy::Analytic, Strategy::ProxDescent] {
                let mut req = ResolventRequest::new(
                    &f,
                    space,
                    &ConvexSet::WholeSpace,
                    x_bar.clone(),
                    lambda,
                    strategy,
                );
                req.tol = 1e-9;
                let got = solve_resolvent(&req).unwrap();
                let gap = space.distance(&got.point, &oracle.1).unwrap();
                assert!(
                    gap <= 1e-5,
                    "{:?} {strategy:?} lambda {lambda}: gap to oracle {gap}",
                    space.kind()
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "oracle comparison took {elapsed:?}");
    println!("[PASS] resolvent equals 10^5-point grid oracle (3 spaces x 3 lambdas x 2 strategies) in {elapsed:?}");
}

#[test]
fn a03_resolvent_map_is_firmly_nonexpansive() {
    let spaces = [SpaceHandle::euclidean(2), SpaceHandle::hyperboloid(2)];
    for space in &spaces {
        let (seg_a, seg_b) = match space.kind() {
            hadamard_ep::SpaceKind::Euclidean { .. } => (e2(-1.0, 0.0), e2(1.0, 0.25)),
            _ => (h2(-0.8, 0.0), h2(0.8, 0.2)),
        };
        let minimization = Bifunction::half_sq_dist(*space, seg_b.clone());
        let seg = ConvexSet::Segment { a: seg_a, b: seg_b };
        let vi = Bifunction::from_map(*space, {
            let space = *space;
            let seg = seg.clone();
            move |x: &Point| space.project(&seg, x).expect("valid segment")
        });
        for (f, strategy, label) in [
            (&minimization, Strategy::Analytic, "minimization"),
            (&vi, Strategy::FixedPoint, "vi/segment-projection"),
        ] {
            let cfg = FirmCheckConfig {
                pairs: 1000,
                seed: 99,
                strategy,
                tol: 1e-9,
                residual_samples: 24,
                ..FirmCheckConfig::default()
            };
            let report =
                check_firmly_nonexpansive(f, space, &ConvexSet::WholeSpace, 1.0, &cfg).unwrap();
            assert!(
                report.firm.worst_violation <= 1e-6,
                "{:?} {label}: violation {}",
                space.kind(),
                report.firm.worst_violation
            );
        }
    }
    println!("[PASS] firm nonexpansiveness on 10^3 pairs (euclidean + hyperboloid, both bifunction families) within 1e-6");
}

fn halving_config() -> SolveConfig {
    let mut config = SolveConfig::exact(e1(1.0), 50);
    config.rng_seed = 7;
    config
}

#[test]
fn a04_ppa_halving_dynamics() {
    let space = SpaceHandle::euclidean(1);
    let f = Bifunction::half_sq_dist(space, e1(0.0));
    let config = halving_config();
    let trace = run_ppa(&f, &space, &ConvexSet::WholeSpace, &config, Some(&e1(0.0))).unwrap();
    assert!(trace.records.len() >= 20);
    for r in trace.records.iter().take(20) {
        let Point::Euclidean { coords } = &r.point else { panic!() };
        let expected = 2.0_f64.powi(-(r.k as i32));
        assert!(
            (coords[0] - expected).abs() <= 1e-10,
            "k = {}: {} vs 2^-k = {expected}",
            r.k,
            coords[0]
        );
    }
    // Vanishing steps on the exact run: the last tenth of the iterations
    // moves below 10x the step tolerance.
    let n = trace.records.len();
    let tail = &trace.records[n - n.div_ceil(10)..];
    assert!(tail.iter().all(|r| r.step <= 10.0 * config.tol_step));
    // Records are consecutive and finite.
    assert!(trace.records.windows(2).all(|w| w[1].k == w[0].k + 1));
    assert!(trace.records.iter().all(|r| r.step.is_finite() && r.residual.is_finite()));
    println!("[PASS] proximal halving dynamics match 2^-k to 1e-10 for k <= 20");
}

struct FrechetInstance {
    space: SpaceHandle,
    f: Bifunction,
    solution: Point,
    config: SolveConfig,
}

fn frechet_instance() -> FrechetInstance {
    let space = SpaceHandle::hyperboloid(2);
    let anchors = vec![h2(1.0, 0.0), h2(-0.5, 0.8), h2(0.2, -0.9)];
    let f = Bifunction::frechet_mean(space, anchors, vec![1.0; 3]);

    // Independent oracle: plain geodesic descent on the potential itself,
    // run far past the tolerance under test.
    let grad = f.hints().potential_grad.clone().unwrap();
    let phi = f.hints().potential.clone().unwrap();
    let mut x = space.basepoint();
    let mut fx = phi(&x);
    for _ in 0..10_000 {
        let g = grad(&x);
        if space.tangent_norm(&x, &g).unwrap() <= 1e-12 {
            break;
        }
        let mut s = 1.0;
        loop {
            let cand = space.exp_map(&x, &g.scale(-s)).unwrap();
            let fc = phi(&cand);
            if fc < fx || s < 1e-18 {
                x = cand;
                fx = fc;
                break;
            }
            s *= 0.5;
        }
    }

    let mut config = SolveConfig::exact(h2(0.9, 0.9), 500);
    config.errors = Schedule::Geometric { init: 0.1, ratio: 0.5 };
    config.tol_step = 1e-9;
    config.resolvent = ResolventDefaults {
        strategy: Strategy::ProxDescent,
        tol: 1e-10,
        max_inner: 100_000,
        residual_samples: 64,
    };
    config.rng_seed = 2718;
    FrechetInstance { space, f, solution: x, config }
}

#[test]
fn a05_quasi_fejer_on_inexact_frechet_mean() {
    let started = Instant::now();
    let inst = frechet_instance();
    let trace =
        run_ppa(&inst.f, &inst.space, &ConvexSet::WholeSpace, &inst.config, Some(&inst.solution))
            .unwrap();
    assert!(trace.records.len() <= 500);
    let report = fejer_report(&inst.space, &trace, &inst.solution, 1e-8).unwrap();
    assert!(report.ok, "quasi-Fejer violated at k = {:?}", report.violations);
    // Steps vanish; on an inexact run their floor is the decaying e_k, so
    // the check compares quartile means rather than absolute thresholds.
    assert!(report.steps_vanishing);
    let final_err = inst.space.distance(&trace.final_point, &inst.solution).unwrap();
    assert!(final_err <= 1e-4, "final error {final_err}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "instance took {elapsed:?}");
    println!(
        "[PASS] quasi-Fejer holds with slack 1e-8 on the inexact Frechet-mean run; final error {final_err:.2e} in {elapsed:?}"
    );
}

fn halpern_instance(u: Point, x0: Point) -> SolveConfig {
    let mut config = SolveConfig::exact(x0, 2000);
    config.anchor_u = Some(u);
    config.tol_step = 1e-9; // keeps the loop running to the full horizon
    config.rng_seed = 11;
    config
}

#[test]
fn a06_halpern_identifies_the_projection_of_u() {
    // Flat instance.
    let space = SpaceHandle::euclidean(2);
    let seg = ConvexSet::Segment { a: e2(0.0, 0.0), b: e2(1.0, 0.0) };
    let u = e2(0.5, 1.0);
    let config = halpern_instance(u.clone(), e2(0.9, 0.5));
    let f = Bifunction::zero(space);
    let trace = run_halpern(&f, &space, &seg, &config, None).unwrap();
    assert_eq!(trace.records.len(), 2000);
    let proj = space.project(&seg, &u).unwrap();
    let d = space.distance(&trace.final_point, &proj).unwrap();
    assert!(d <= 1e-3, "euclidean: d(x_2000, proj u) = {d}");

    // Tree instance: the projection of u onto a cross-ray segment is the
    // origin.
    let space = SpaceHandle::star_tree(3);
    let seg = ConvexSet::Segment { a: Point::star_tree(0, 1.0), b: Point::star_tree(1, 0.75) };
    let u = Point::star_tree(2, 1.5);
    let config = halpern_instance(u.clone(), Point::star_tree(0, 0.4));
    let f = Bifunction::zero(space);
    let trace = run_halpern(&f, &space, &seg, &config, None).unwrap();
    assert_eq!(trace.records.len(), 2000);
    let proj = space.project(&seg, &u).unwrap();
    assert!(space.distance(&proj, &Point::star_tree(0, 0.0)).unwrap() <= 1e-9);
    let d = space.distance(&trace.final_point, &proj).unwrap();
    assert!(d <= 1e-3, "star tree: d(x_2000, proj u) = {d}");

    println!("[PASS] Halpern run lands within 1e-3 of the projection of u (euclidean + star tree, 2000 iterations)");
}

fn path_instance() -> (SpaceHandle, Bifunction, Point, Point, Vec<f64>) {
    let space = SpaceHandle::euclidean(2);
    let (a, b) = (e2(0.0, 0.0), e2(2.0, 0.0));
    let f = Bifunction::sq_dist_to_segment(space, a.clone(), b.clone());
    let x = e2(1.25, 3.0);
    let seg = ConvexSet::Segment { a, b };
    let proj = space.project(&seg, &x).unwrap();
    let lambdas: Vec<f64> = (0..=12).map(|j| 2.0_f64.powi(-j)).collect();
    (space, f, x, proj, lambdas)
}

#[test]
fn a07_resolvent_path_approaches_the_segment_projection() {
    let (space, f, x, proj, lambdas) = path_instance();
    let template = ResolventRequest::new(&f, &space, &ConvexSet::WholeSpace, x.clone(), 1.0, Strategy::Analytic)
        .with_tol(1e-9)
        .with_seed(31);
    let path =
        resolvent_path(&f, &space, &ConvexSet::WholeSpace, &x, &lambdas, &template).unwrap();
    let mut prev = f64::INFINITY;
    for (lam, r) in lambdas.iter().zip(&path) {
        let d = space.distance(&r.point, &proj).unwrap();
        assert!(d <= prev + 1e-8, "distance to the projection rose at lambda {lam}");
        prev = d;
    }
    assert!(prev <= 1e-3, "gap at the smallest lambda: {prev}");

    // Uniqueness across strategies: descent lands on the same points.
    let mut descent_template = template.clone();
    descent_template.strategy = Strategy::ProxDescent;
    let descent =
        resolvent_path(&f, &space, &ConvexSet::WholeSpace, &x, &lambdas, &descent_template)
            .unwrap();
    for (a, b) in path.iter().zip(&descent) {
        assert!(space.distance(&a.point, &b.point).unwrap() <= 1e-5);
    }
    println!(
        "[PASS] resolvent path decreases to the segment projection (gap {prev:.2e} at lambda 2^-12, two strategies agree)"
    );
}

#[test]
fn a08_reruns_are_byte_identical() {
    // Halving trace.
    let space = SpaceHandle::euclidean(1);
    let f = Bifunction::half_sq_dist(space, e1(0.0));
    let run = || {
        run_ppa(&f, &space, &ConvexSet::WholeSpace, &halving_config(), Some(&e1(0.0)))
            .unwrap()
            .to_csv()
    };
    assert_eq!(run(), run());

    // Inexact Frechet-mean trace (randomized perturbations).
    let inst = frechet_instance();
    let run = || {
        run_ppa(&inst.f, &inst.space, &ConvexSet::WholeSpace, &inst.config, Some(&inst.solution))
            .unwrap()
            .to_csv()
    };
    assert_eq!(run(), run());

    // Halpern trace.
    let space = SpaceHandle::euclidean(2);
    let seg = ConvexSet::Segment { a: e2(0.0, 0.0), b: e2(1.0, 0.0) };
    let u = e2(0.5, 1.0);
    let zero = Bifunction::zero(space);
    let run = || {
        let config = halpern_instance(u.clone(), e2(0.9, 0.5));
        run_halpern(&zero, &space, &seg, &config, None).unwrap().to_csv()
    };
    assert_eq!(run(), run());

    // Resolvent path trace.
    let (space, f, x, proj, lambdas) = path_instance();
    let run = || {
        let template =
            ResolventRequest::new(&f, &space, &ConvexSet::WholeSpace, x.clone(), 1.0, Strategy::Analytic)
                .with_tol(1e-9)
                .with_seed(31);
        let path =
            resolvent_path(&f, &space, &ConvexSet::WholeSpace, &x, &lambdas, &template).unwrap();
        path_trace(&space, &x, &lambdas, &path, Some(&proj)).unwrap().to_csv()
    };
    assert_eq!(run(), run());

    println!("[PASS] repeated runs with fixed seeds produce byte-identical CSV traces");
}

#[test]
fn a09_negative_controls() {
    // An expansive map's bifunction must be flagged by the monotonicity
    // checker, with a witness pair.
    let space = SpaceHandle::euclidean(2);
    let f = Bifunction::from_map(space, |x: &Point| {
        let Point::Euclidean { coords } = x else { unreachable!() };
        Point::euclidean(coords.iter().map(|c| 1.5 * c).collect())
    });
    let report = check_property(
        &f,
        &space,
        &ConvexSet::WholeSpace,
        BifunctionProperty::Monotone,
        &CheckConfig { samples: 5000, seed: 13, ..CheckConfig::default() },
    )
    .unwrap();
    assert!(report.worst_violation > 1e-6, "expansive map slipped through");
    assert!(!report.witnesses.is_empty(), "violation reported without a witness");

    // The residual check must reject the anchor when it is not the
    // resolvent, with the potential's target as the violating probe.
    let a = e2(1.0, 1.0);
    let g = Bifunction::half_sq_dist(space, a.clone());
    let x_bar = e2(-1.0, 0.5);
    let r = residual(
        &g,
        &space,
        &ConvexSet::WholeSpace,
        &x_bar,
        &x_bar,
        1.0,
        200,
        17,
        std::slice::from_ref(&a),
        ExecMode::default(),
    )
    .unwrap();
    assert!(r.value < 0.0, "non-solution accepted by the residual check");
    assert_eq!(r.witness, a);

    println!("[PASS] negative controls: expansive map flagged with witness; residual check rejects the anchor");
}
