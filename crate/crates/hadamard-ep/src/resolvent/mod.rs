//! The resolvent J_lambda: the unique equilibrium point of the regularized
//! bifunction f~(x, y) = f(x, y) + lambda <(anchor -> x), (x -> y)>.
//!
//! Large lambda means strong regularization (the solution hugs the anchor);
//! the classical proximal parameterization argmin phi + d^2/(2(step)) maps
//! to lambda = 1/step here. Three strategies are available, and every solve
//! is verified a posteriori by a sampled residual: a result is returned
//! only if the equilibrium inequality holds on all probes up to `tol`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bifunctions::{Bifunction, BifunctionProperty, PropertyReport};
use crate::exec::{map_collect, ExecMode};
use crate::sampling::{sample_ball, seeded_rng, SetSampler};
use crate::spaces::{ConvexSet, GeodesicParam, Point, SpaceError, SpaceHandle, SpaceKind};

#[derive(Debug, Error)]
pub enum ResolventError {
    #[error("no applicable strategy: {0}")]
    NoStrategy(&'static str),
    #[error("inner solver diverged: {0}")]
    InnerDiverged(String),
    #[error("lambda {lambda} must exceed the undermonotonicity constant {theta}")]
    LambdaTooSmall { lambda: f64, theta: f64 },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Call the bifunction's registered closed form.
    Analytic,
    /// Contraction iteration z <- (1/(1+lambda)) Tz (+) (lambda/(1+lambda)) anchor
    /// for variational-inequality bifunctions.
    FixedPoint,
    /// Geodesic projected gradient descent on phi + (lambda/2) d^2(., anchor)
    /// for minimization bifunctions; per-ray golden section on star trees.
    ProxDescent,
}

#[derive(Debug, Clone)]
pub struct ResolventRequest<'a> {
    pub f: &'a Bifunction,
    pub space: &'a SpaceHandle,
    pub set: &'a ConvexSet,
    pub anchor: Point,
    pub lambda: f64,
    pub strategy: Strategy,
    /// Residual tolerance; inner stopping thresholds are derived from it.
    pub tol: f64,
    pub max_inner: usize,
    /// Seed for the residual probe draws.
    pub seed: u64,
    /// Number of residual probes (structured probes plus seeded draws).
    pub residual_samples: usize,
    /// Optional starting point for iterative strategies (defaults to the
    /// anchor projected onto K).
    pub start: Option<Point>,
    pub exec: ExecMode,
}

impl<'a> ResolventRequest<'a> {
    pub fn new(
        f: &'a Bifunction,
        space: &'a SpaceHandle,
        set: &'a ConvexSet,
        anchor: Point,
        lambda: f64,
        strategy: Strategy,
    ) -> Self {
        ResolventRequest {
            f,
            space,
            set,
            anchor,
            lambda,
            strategy,
            tol: 1e-8,
            max_inner: 100_000,
            seed: 0,
            residual_samples: 200,
            start: None,
            exec: ExecMode::default(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_start(mut self, start: Point) -> Self {
        self.start = Some(start);
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventResult {
    pub point: Point,
    /// Sampled min of f(z,y) + lambda <(anchor -> z), (z -> y)> over probes
    /// y in K; nonnegative (up to tol) at a true resolvent point.
    pub residual: f64,
    pub inner_iterations: usize,
    pub strategy_used: Strategy,
}

/// The regularized bifunction f~ itself, as a first-class bifunction. With
/// f monotone it is strongly monotone with modulus lambda.
pub fn auxiliary_bifunction(f: &Bifunction, anchor: Point, lambda: f64) -> Bifunction {
    let space = f.space();
    let inner = f.clone();
    let theta = f.hints().theta;
    let b = Bifunction::new(space, move |x, y| {
        inner.eval(x, y)
            + lambda * space.quasilinearization(&anchor, x, x, y).expect("same-kind points")
    });
    match theta {
        Some(t) => b.with_theta((t - lambda).max(0.0)),
        None => b,
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub value: f64,
    /// The probe achieving the minimum; a certificate when the value is
    /// negative.
    pub witness: Point,
}

/// Sampled membership test for the regularized equilibrium problem: the
/// minimum of f(z,y) + lambda <(anchor -> z), (z -> y)> over probes y in K.
/// Structured probes (set extremes, the projected anchor, caller-supplied
/// points) are always included ahead of the seeded draws.
#[allow(clippy::too_many_arguments)]
pub fn residual(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    z: &Point,
    anchor: &Point,
    lambda: f64,
    samples: usize,
    seed: u64,
    extra_probes: &[Point],
    exec: ExecMode,
) -> Result<ResidualReport, SpaceError> {
    let mut probes: Vec<Point> = Vec::with_capacity(samples + 8);
    match set {
        ConvexSet::WholeSpace => probes.push(space.basepoint()),
        ConvexSet::Ball { center, .. } => probes.push(center.clone()),
        ConvexSet::Segment { a, b } => {
            probes.push(a.clone());
            probes.push(b.clone());
            probes.push(space.geodesic_point(a, b, GeodesicParam::new(0.5))?);
        }
        ConvexSet::Subtree { rays, cap } => {
            probes.push(Point::star_tree(0, 0.0));
            if let Some(c) = cap {
                for r in rays {
                    probes.push(Point::star_tree(*r, *c));
                }
            }
        }
    }
    probes.push(space.project(set, anchor)?);
    probes.extend_from_slice(extra_probes);
    let mut sampler = SetSampler::new(space, set, default_probe_radius(space, anchor, z), seed)?;
    while probes.len() < samples {
        probes.push(sampler.sample());
    }

    // For variational-inequality bifunctions T(z) is independent of the
    // probe, so hoist it out of the loop.
    let hoisted_map = f.hints().map.as_ref().map(|m| m(z));
    let vals: Vec<f64> = map_collect(exec, &probes, |y| {
        let fv = match &hoisted_map {
            Some(tz) => space.quasilinearization(tz, z, z, y).expect("same-kind points"),
            None => f.eval(z, y),
        };
        fv + lambda * space.quasilinearization(anchor, z, z, y).expect("same-kind points")
    });
    let (mut best, mut at) = (f64::INFINITY, 0usize);
    for (i, v) in vals.iter().enumerate() {
        if *v < best {
            best = *v;
            at = i;
        }
    }
    Ok(ResidualReport { value: best, witness: probes[at].clone() })
}

fn default_probe_radius(space: &SpaceHandle, anchor: &Point, z: &Point) -> f64 {
    let base = space.basepoint();
    let ra = space.distance(&base, anchor).unwrap_or(0.0);
    let rz = space.distance(&base, z).unwrap_or(0.0);
    (2.0 * ra.max(rz)).max(2.0)
}

/// Solves the regularized equilibrium problem at the request's anchor.
///
/// Every strategy ends with the sampled residual check; a point that fails
/// it is not returned.
pub fn solve_resolvent(req: &ResolventRequest) -> Result<ResolventResult, ResolventError> {
    let space = req.space;
    if req.f.space() != *space {
        return Err(ResolventError::InvalidRequest(
            "bifunction was built for a different space".into(),
        ));
    }
    space.validate_set(req.set)?;
    space.validate_point(&req.anchor)?;
    if !(req.lambda > 0.0) {
        return Err(ResolventError::InvalidRequest("lambda must be > 0".into()));
    }
    if let Some(theta) = req.f.hints().theta {
        if req.lambda <= theta {
            return Err(ResolventError::LambdaTooSmall { lambda: req.lambda, theta });
        }
    }

    let (point, inner_iterations) = match req.strategy {
        Strategy::Analytic => {
            let a = req
                .f
                .hints()
                .analytic_resolvent
                .as_ref()
                .ok_or(ResolventError::NoStrategy("no closed form registered"))?;
            let p = a(req.set, &req.anchor, req.lambda).ok_or(ResolventError::NoStrategy(
                "registered closed form does not cover this feasible set",
            ))?;
            (p, 0)
        }
        Strategy::FixedPoint => {
            let (p, iters, _steps) = fixed_point(req)?;
            (p, iters)
        }
        Strategy::ProxDescent => prox_descent(req)?,
    };

    let res = residual(
        req.f,
        space,
        req.set,
        &point,
        &req.anchor,
        req.lambda,
        req.residual_samples,
        req.seed,
        &[],
        req.exec,
    )?;
    if res.value < -req.tol {
        return Err(ResolventError::InnerDiverged(format!(
            "residual {:.3e} below -tol at a sampled probe",
            res.value
        )));
    }
    Ok(ResolventResult {
        point,
        residual: res.value,
        inner_iterations,
        strategy_used: req.strategy,
    })
}

/// Contraction iteration for variational-inequality bifunctions. Also
/// returns the step lengths so tests can confirm the geometric decay with
/// ratio 1/(1+lambda).
pub(crate) fn fixed_point(
    req: &ResolventRequest,
) -> Result<(Point, usize, Vec<f64>), ResolventError> {
    let map = req
        .f
        .hints()
        .map
        .as_ref()
        .ok_or(ResolventError::NoStrategy("fixed-point strategy needs a map hint"))?;
    let space = req.space;
    let constrained = !matches!(req.set, ConvexSet::WholeSpace);
    let t = GeodesicParam::new(req.lambda / (1.0 + req.lambda));
    // The contraction amplifies the step-to-error ratio by 1/lambda, so the
    // stopping threshold is stricter than the residual tolerance.
    let step_tol = (req.tol * req.lambda.min(1.0) * 1e-2).max(1e-15);
    let mut z = match &req.start {
        Some(s) => s.clone(),
        None => space.project(req.set, &req.anchor)?,
    };
    let mut steps = Vec::new();
    let mut best_step = f64::INFINITY;
    let mut stagnant = 0u32;
    for k in 0..req.max_inner {
        let tz = map(&z);
        let mut next = space.geodesic_point(&tz, &req.anchor, t)?;
        if constrained {
            next = space.project(req.set, &next)?;
        }
        let step = space.distance(&z, &next)?;
        steps.push(step);
        z = next;
        if step <= step_tol {
            return Ok((z, k + 1, steps));
        }
        // A noisy map can wobble above the threshold without contracting
        // further; break out and let the residual check judge the point.
        if step < best_step {
            best_step = step;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= 50 {
                return Ok((z, k + 1, steps));
            }
        }
    }
    Err(ResolventError::InnerDiverged(format!(
        "fixed-point iteration still moving {:.3e} after {} steps",
        steps.last().copied().unwrap_or(f64::NAN),
        req.max_inner
    )))
}

/// Minimizes phi + (lambda/2) d^2(., anchor) over K.
fn prox_descent(req: &ResolventRequest) -> Result<(Point, usize), ResolventError> {
    let phi = req
        .f
        .hints()
        .potential
        .as_ref()
        .ok_or(ResolventError::NoStrategy("prox-descent strategy needs a potential hint"))?;
    let space = req.space;
    let lambda = req.lambda;
    let objective = |y: &Point| -> f64 {
        let d = space.distance(y, &req.anchor).expect("same-kind point");
        phi(y) + 0.5 * lambda * d * d
    };

    if let SpaceKind::StarTree { rays } = space.kind() {
        return tree_prox(req, &objective, rays);
    }

    let grad_phi = req.f.hints().potential_grad.as_ref().ok_or(ResolventError::NoStrategy(
        "prox-descent on a manifold needs a gradient hint",
    ))?;
    let constrained = !matches!(req.set, ConvexSet::WholeSpace);
    let stop_tol = (req.tol * lambda.min(1.0) * 1e-2).max(1e-14);
    let step = |y: &Point, g: &crate::spaces::Tangent, s: f64| -> Result<Point, ResolventError> {
        let e = space.exp_map(y, &g.scale(-s))?;
        Ok(if constrained { space.project(req.set, &e)? } else { e })
    };
    let gradient = |y: &Point| -> Result<crate::spaces::Tangent, ResolventError> {
        // grad of (lambda/2) d^2(., anchor) is -lambda log_y(anchor)
        Ok(grad_phi(y).add(&space.log_map(y, &req.anchor)?.scale(-lambda)))
    };

    let mut y = match &req.start {
        Some(s) => s.clone(),
        None => space.project(req.set, &req.anchor)?,
    };
    let mut fy = objective(&y);
    let mut iters = 0usize;
    // Armijo phase: reliable while objective differences stay above
    // floating-point noise. Near the optimum those differences drown and
    // value comparisons would accept noise-driven backward jumps, so the
    // loop hands over to a gradient-only polish phase at that scale.
    let mut polish_step = 1.0_f64;
    while iters < req.max_inner {
        iters += 1;
        let g = gradient(&y)?;
        let trial = step(&y, &g, 1.0)?;
        if space.distance(&y, &trial)? <= stop_tol {
            return Ok((y, iters));
        }
        let mut s = 1.0_f64;
        let mut accepted = false;
        let mut moved = 0.0;
        for _ in 0..50 {
            let cand = step(&y, &g, s)?;
            let fc = objective(&cand);
            moved = space.distance(&y, &cand)?;
            if fc <= fy - 1e-4 * (moved * moved) / s.max(1e-300) {
                y = cand;
                fy = fc;
                accepted = true;
                polish_step = s;
                break;
            }
            s *= 0.5;
        }
        if !accepted || moved <= 1e-6 {
            break;
        }
    }
    // Polish phase: fixed-step projected gradient. An Armijo-accepted step
    // size keeps it contractive, so displacement decreases monotonically;
    // an increase means the step is too long and gets halved.
    let mut prev_disp = f64::INFINITY;
    for _ in 0..400 {
        iters += 1;
        let g = gradient(&y)?;
        let cand = step(&y, &g, polish_step)?;
        let disp = space.distance(&y, &cand)?;
        if disp > prev_disp {
            polish_step *= 0.5;
            if polish_step < 1e-12 {
                break;
            }
            continue;
        }
        y = cand;
        if disp <= stop_tol {
            return Ok((y, iters));
        }
        prev_disp = disp;
    }
    // The final residual check decides whether the polished point is good.
    Ok((y, iters))
}

/// On a star tree the objective restricted to each ray is one-dimensional
/// and convex: golden-section per admissible ray, then the best ray wins.
fn tree_prox(
    req: &ResolventRequest,
    objective: &dyn Fn(&Point) -> f64,
    rays: usize,
) -> Result<(Point, usize), ResolventError> {
    let space = req.space;
    if let ConvexSet::Segment { a, b } = req.set {
        // The segment is itself one-dimensional: golden-section in t.
        let g = |t: f64| {
            let p = space.geodesic_point(a, b, GeodesicParam::new(t)).expect("validated segment");
            objective(&p)
        };
        let (t, iters) = golden_section(&g, 0.0, 1.0, 1e-10);
        return Ok((space.geodesic_point(a, b, GeodesicParam::new(t))?, iters));
    }

    let base = space.basepoint();
    let anchor_reach = space.distance(&base, &req.anchor)?;
    let mut best: Option<(f64, Point)> = None;
    let mut total_iters = 0usize;
    for ray in 0..rays {
        let Some((lo, hi)) = ray_interval(req, ray, anchor_reach)? else { continue };
        let g = |r: f64| objective(&Point::star_tree(ray, r));
        let (r, iters) = golden_section(&g, lo, hi, 1e-10);
        total_iters += iters;
        let p = Point::star_tree(ray, r);
        let val = objective(&p);
        match &best {
            Some((v, _)) if *v <= val => {}
            _ => best = Some((val, p)),
        }
    }
    let (_, p) = best.ok_or(ResolventError::InvalidRequest(
        "feasible set contains no ray interval".into(),
    ))?;
    Ok((p, total_iters))
}

/// Admissible radius interval of `ray` inside the feasible set, or None if
/// the ray only meets the set at radius ranges below zero.
fn ray_interval(
    req: &ResolventRequest,
    ray: usize,
    anchor_reach: f64,
) -> Result<Option<(f64, f64)>, ResolventError> {
    // Beyond this radius the regularization term alone dominates any value
    // closer in, so minimizers never live there.
    let far = 2.0 * anchor_reach + 2.0 / req.lambda.min(1.0) + 4.0;
    Ok(match req.set {
        ConvexSet::WholeSpace => Some((0.0, far)),
        ConvexSet::Subtree { rays, cap } => {
            if rays.contains(&ray) {
                Some((0.0, cap.unwrap_or(far).min(far)))
            } else if ray == 0 {
                Some((0.0, 0.0)) // the origin is always feasible
            } else {
                None
            }
        }
        ConvexSet::Ball { center, radius } => {
            let Point::StarTree { ray: cr, radius: crad } = center else {
                return Err(ResolventError::InvalidRequest("ball center off the tree".into()));
            };
            if ray == *cr {
                Some(((crad - radius).max(0.0), crad + radius))
            } else if radius >= crad {
                Some((0.0, radius - crad))
            } else {
                None
            }
        }
        ConvexSet::Segment { .. } => unreachable!("segments handled before ray scan"),
    })
}

fn golden_section(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, usize) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if hi - lo <= width {
        return (0.5 * (lo + hi), 0);
    }
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut iters = 0;
    while hi - lo > width && iters < 300 {
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - INV_PHI * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + INV_PHI * (hi - lo);
            gd = g(d);
        }
        iters += 1;
    }
    (0.5 * (lo + hi), iters)
}

/// Resolvent points J_lambda(x) for a strictly decreasing lambda sequence
/// at a fixed base point. As lambda -> 0 (vanishing regularization) the
/// points approach the projection of x onto the solution set.
pub fn resolvent_path(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    x: &Point,
    lambdas: &[f64],
    template: &ResolventRequest,
) -> Result<Vec<ResolventResult>, ResolventError> {
    if lambdas.is_empty() {
        return Err(ResolventError::InvalidRequest("empty lambda sequence".into()));
    }
    for w in lambdas.windows(2) {
        if !(w[1] < w[0]) {
            return Err(ResolventError::InvalidRequest(
                "lambda sequence must be strictly decreasing".into(),
            ));
        }
    }
    if !(lambdas[lambdas.len() - 1] > 0.0) {
        return Err(ResolventError::InvalidRequest("lambdas must stay positive".into()));
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for (i, lam) in lambdas.iter().enumerate() {
        let mut req = template.clone();
        req.f = f;
        req.space = space;
        req.set = set;
        req.anchor = x.clone();
        req.lambda = *lam;
        req.seed = template.seed.wrapping_add(i as u64);
        out.push(solve_resolvent(&req)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirmCheckConfig {
    pub pairs: usize,
    pub seed: u64,
    pub radius: f64,
    pub strategy: Strategy,
    pub tol: f64,
    pub max_inner: usize,
    /// Residual probes per inner solve (lighter than a standalone solve).
    pub residual_samples: usize,
    #[serde(default)]
    pub exec: ExecMode,
}

impl Default for FirmCheckConfig {
    fn default() -> Self {
        FirmCheckConfig {
            pairs: 1000,
            seed: 0,
            radius: 2.0,
            strategy: Strategy::Analytic,
            tol: 1e-8,
            max_inner: 100_000,
            residual_samples: 48,
            exec: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventMapReport {
    pub firm: PropertyReport,
    /// Worst violation of the plain nonexpansiveness d(Jx,Jz) <= d(x,z),
    /// which Cauchy-Schwarz derives from the firm inequality.
    pub nonexpansive_violation: f64,
}

/// Samples pairs (x, z) from the ambient space and checks the firm
/// nonexpansiveness of the resolvent map:
/// <(x -> z), (Jx -> Jz)> >= d^2(Jx, Jz).
pub fn check_firmly_nonexpansive(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    lambda: f64,
    cfg: &FirmCheckConfig,
) -> Result<ResolventMapReport, ResolventError> {
    let mut rng = seeded_rng(cfg.seed);
    let base = space.basepoint();
    let pairs: Vec<(Point, Point)> = (0..cfg.pairs)
        .map(|_| (sample_ball(space, &mut rng, &base, cfg.radius), sample_ball(space, &mut rng, &base, cfg.radius)))
        .collect();

    let solve = |anchor: &Point, seed: u64| -> Result<Point, ResolventError> {
        let mut req = ResolventRequest::new(f, space, set, anchor.clone(), lambda, cfg.strategy);
        req.tol = cfg.tol;
        req.max_inner = cfg.max_inner;
        req.residual_samples = cfg.residual_samples;
        req.seed = seed;
        req.exec = ExecMode::Sequential; // parallelism lives at the pair level
        Ok(solve_resolvent(&req)?.point)
    };

    let rows: Vec<Result<(f64, f64), String>> =
        map_collect(cfg.exec, &pairs, |(x, z)| {
            let jx = solve(x, cfg.seed).map_err(|e| e.to_string())?;
            let jz = solve(z, cfg.seed.wrapping_add(1)).map_err(|e| e.to_string())?;
            let djj = space.distance(&jx, &jz).expect("same-kind points");
            let inner = space.quasilinearization(x, z, &jx, &jz).expect("same-kind points");
            let firm = djj * djj - inner;
            let nonexp = djj - space.distance(x, z).expect("same-kind points");
            Ok((firm, nonexp))
        });

    let mut worst_firm = f64::NEG_INFINITY;
    let mut worst_at = 0usize;
    let mut worst_nonexp = f64::NEG_INFINITY;
    for (i, row) in rows.iter().enumerate() {
        let (firm, nonexp) = match row {
            Ok(v) => *v,
            Err(e) => return Err(ResolventError::InnerDiverged(e.clone())),
        };
        if firm > worst_firm {
            worst_firm = firm;
            worst_at = i;
        }
        worst_nonexp = worst_nonexp.max(nonexp);
    }
    let witnesses = if worst_firm > cfg.tol {
        let (x, z) = &pairs[worst_at];
        vec![vec![x.clone(), z.clone()]]
    } else {
        Vec::new()
    };
    Ok(ResolventMapReport {
        firm: PropertyReport {
            property: BifunctionProperty::FirmlyNonexpansive,
            samples: cfg.pairs,
            worst_violation: worst_firm,
            estimate: None,
            witnesses,
        },
        nonexpansive_violation: worst_nonexp,
    })
}

/// Checks <(x -> p), (Jx -> p)> >= d^2(Jx, p) against a known solution p.
pub fn check_quasi_firmly_nonexpansive(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    lambda: f64,
    solution: &Point,
    cfg: &FirmCheckConfig,
) -> Result<PropertyReport, ResolventError> {
    let mut rng = seeded_rng(cfg.seed);
    let base = space.basepoint();
    let xs: Vec<Point> = (0..cfg.pairs).map(|_| sample_ball(space, &mut rng, &base, cfg.radius)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness: Option<Vec<Point>> = None;
    for (i, x) in xs.iter().enumerate() {
        let mut req = ResolventRequest::new(f, space, set, x.clone(), lambda, cfg.strategy);
        req.tol = cfg.tol;
        req.max_inner = cfg.max_inner;
        req.residual_samples = cfg.residual_samples;
        req.seed = cfg.seed.wrapping_add(i as u64);
        let jx = solve_resolvent(&req)?.point;
        let dj = space.distance(&jx, solution)?;
        let inner = space.quasilinearization(x, solution, &jx, solution)?;
        let v = dj * dj - inner;
        if v > worst {
            worst = v;
            witness = Some(vec![x.clone()]);
        }
    }
    let witnesses = if worst > cfg.tol { witness.into_iter().collect() } else { Vec::new() };
    Ok(PropertyReport {
        property: BifunctionProperty::QuasiFirmlyNonexpansive,
        samples: cfg.pairs,
        worst_violation: worst,
        estimate: None,
        witnesses,
    })
}
