//! Geometry kernel for three concrete Hadamard spaces.
//!
//! The three models cover the CAT(0) spectrum: `Euclidean` is the flat case
//! (where the quasi-linearization is an honest inner product), `Hyperboloid`
//! is smooth with strictly negative curvature, and `StarTree` is a
//! non-manifold space with branching geodesics. All operations are pure;
//! points and handles are immutable and safe to share across threads.

mod checks;
mod hyperboloid;

pub use checks::{
    run_space_sweep, Distortion, GeometryCheck, SpaceSweepConfig, SpaceSweepReport, SweepCheck,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack used for membership tests and point validation.
const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("point of kind {point} passed to a {space} handle")]
    KindMismatch { space: String, point: String },
    #[error("operation `{op}` is not supported on {space}")]
    Unsupported { op: &'static str, space: String },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

/// Identifies one of the three concrete spaces together with its size
/// parameter (dimension, or number of rays for the star tree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Euclidean { dim: usize },
    Hyperboloid { dim: usize },
    StarTree { rays: usize },
}

impl SpaceKind {
    fn name(&self) -> &'static str {
        match self {
            SpaceKind::Euclidean { .. } => "euclidean",
            SpaceKind::Hyperboloid { .. } => "hyperboloid",
            SpaceKind::StarTree { .. } => "star_tree",
        }
    }
}

/// A location in one of the three spaces.
///
/// Hyperboloid points live on the upper sheet of the unit hyperboloid in
/// Minkowski space: n+1 coordinates with `-x0^2 + sum xi^2 = -1` and
/// `x0 > 0`. Star-tree points are (ray, radius) with the origin
/// canonicalized to ray 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Euclidean { coords: Vec<f64> },
    Hyperboloid { coords: Vec<f64> },
    StarTree { ray: usize, radius: f64 },
}

impl Point {
    pub fn euclidean(coords: Vec<f64>) -> Self {
        Point::Euclidean { coords }
    }

    /// Builds a hyperboloid point, rejecting coordinates that are off the
    /// sheet by more than a parse-level slack and renormalizing the rest.
    pub fn hyperboloid(coords: Vec<f64>) -> Result<Self, SpaceError> {
        hyperboloid::make_point(coords, 1e-6)
    }

    pub fn star_tree(ray: usize, radius: f64) -> Self {
        if radius <= 0.0 {
            Point::StarTree { ray: 0, radius: 0.0 }
        } else {
            Point::StarTree { ray, radius }
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Point::Euclidean { .. } => "euclidean",
            Point::Hyperboloid { .. } => "hyperboloid",
            Point::StarTree { .. } => "star_tree",
        }
    }
}

/// A tangent vector at some base point of a manifold-like space, stored in
/// ambient coordinates (n for Euclidean, n+1 Minkowski for the hyperboloid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tangent(pub Vec<f64>);

impl Tangent {
    pub fn zero(len: usize) -> Self {
        Tangent(vec![0.0; len])
    }

    pub fn scale(&self, s: f64) -> Self {
        Tangent(self.0.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &Tangent) -> Self {
        Tangent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Closed convex subsets used as feasible sets K.
///
/// Every variant is geodesically convex in its space. `Subtree` is only
/// meaningful on a star tree: the union of the listed rays truncated at
/// `cap` (unbounded when `cap` is `None`); it always contains the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    WholeSpace,
    Ball { center: Point, radius: f64 },
    Segment { a: Point, b: Point },
    Subtree { rays: Vec<usize>, cap: Option<f64> },
}

/// Parameter of a geodesic convex combination, clamped to [0, 1] by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParam(f64);

impl GeodesicParam {
    pub fn new(t: f64) -> Self {
        GeodesicParam(t.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Handle to one concrete space; all geometric operations go through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceHandle {
    kind: SpaceKind,
}

impl SpaceHandle {
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 1, "euclidean dimension must be >= 1");
        SpaceHandle { kind: SpaceKind::Euclidean { dim } }
    }

    pub fn hyperboloid(dim: usize) -> Self {
        assert!(dim >= 1, "hyperboloid dimension must be >= 1");
        SpaceHandle { kind: SpaceKind::Hyperboloid { dim } }
    }

    pub fn star_tree(rays: usize) -> Self {
        assert!(rays >= 2, "star tree needs at least 2 rays");
        SpaceHandle { kind: SpaceKind::StarTree { rays } }
    }

    pub fn from_kind(kind: SpaceKind) -> Self {
        match kind {
            SpaceKind::Euclidean { dim } => Self::euclidean(dim),
            SpaceKind::Hyperboloid { dim } => Self::hyperboloid(dim),
            SpaceKind::StarTree { rays } => Self::star_tree(rays),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// A fixed reference point: the origin of R^n, the apex (1, 0, ..., 0)
    /// of the hyperboloid, or the tree origin.
    pub fn basepoint(&self) -> Point {
        match self.kind {
            SpaceKind::Euclidean { dim } => Point::euclidean(vec![0.0; dim]),
            SpaceKind::Hyperboloid { dim } => {
                let mut c = vec![0.0; dim + 1];
                c[0] = 1.0;
                Point::Hyperboloid { coords: c }
            }
            SpaceKind::StarTree { .. } => Point::star_tree(0, 0.0),
        }
    }

    /// Ambient coordinate length of tangent vectors (manifold kinds only).
    pub fn tangent_len(&self) -> Result<usize, SpaceError> {
        match self.kind {
            SpaceKind::Euclidean { dim } => Ok(dim),
            SpaceKind::Hyperboloid { dim } => Ok(dim + 1),
            SpaceKind::StarTree { .. } => Err(self.unsupported("tangent_len")),
        }
    }

    fn unsupported(&self, op: &'static str) -> SpaceError {
        SpaceError::Unsupported { op, space: self.kind.name().to_string() }
    }

    fn mismatch(&self, p: &Point) -> SpaceError {
        SpaceError::KindMismatch {
            space: self.kind.name().to_string(),
            point: p.kind_name().to_string(),
        }
    }

    /// Checks that `p` belongs to this handle's space, including dimension
    /// and (for the hyperboloid) the sheet constraint.
    pub fn validate_point(&self, p: &Point) -> Result<(), SpaceError> {
        match (self.kind, p) {
            (SpaceKind::Euclidean { dim }, Point::Euclidean { coords }) => {
                if coords.len() != dim {
                    return Err(SpaceError::InvalidPoint(format!(
                        "expected {dim} coordinates, got {}",
                        coords.len()
                    )));
                }
                if coords.iter().any(|v| !v.is_finite()) {
                    return Err(SpaceError::InvalidPoint("non-finite coordinate".into()));
                }
                Ok(())
            }
            (SpaceKind::Hyperboloid { dim }, Point::Hyperboloid { coords }) => {
                if coords.len() != dim + 1 {
                    return Err(SpaceError::InvalidPoint(format!(
                        "expected {} coordinates, got {}",
                        dim + 1,
                        coords.len()
                    )));
                }
                hyperboloid::validate(coords, MEMBERSHIP_TOL)
            }
            (SpaceKind::StarTree { rays }, Point::StarTree { ray, radius }) => {
                if *ray >= rays {
                    return Err(SpaceError::InvalidPoint(format!(
                        "ray {ray} out of range for {rays} rays"
                    )));
                }
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(SpaceError::InvalidPoint("radius must be finite and >= 0".into()));
                }
                if *radius == 0.0 && *ray != 0 {
                    return Err(SpaceError::InvalidPoint(
                        "the origin is canonicalized to ray 0".into(),
                    ));
                }
                Ok(())
            }
            _ => Err(self.mismatch(p)),
        }
    }

    fn check_kind(&self, p: &Point) -> Result<(), SpaceError> {
        match (self.kind, p) {
            (SpaceKind::Euclidean { .. }, Point::Euclidean { .. })
            | (SpaceKind::Hyperboloid { .. }, Point::Hyperboloid { .. })
            | (SpaceKind::StarTree { .. }, Point::StarTree { .. }) => Ok(()),
            _ => Err(self.mismatch(p)),
        }
    }

    /// The metric d(p, q).
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64, SpaceError> {
        self.check_kind(p)?;
        self.check_kind(q)?;
        Ok(match (p, q) {
            (Point::Euclidean { coords: a }, Point::Euclidean { coords: b }) => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            (Point::Hyperboloid { coords: a }, Point::Hyperboloid { coords: b }) => {
                hyperboloid::distance(a, b)
            }
            (
                Point::StarTree { ray: r1, radius: a },
                Point::StarTree { ray: r2, radius: b },
            ) => {
                if r1 == r2 || *a == 0.0 || *b == 0.0 {
                    (a - b).abs()
                } else {
                    a + b
                }
            }
            _ => unreachable!("kinds checked above"),
        })
    }

    /// The unique point z on [p, q] with d(p, z) = t d(p, q).
    pub fn geodesic_point(
        &self,
        p: &Point,
        q: &Point,
        t: GeodesicParam,
    ) -> Result<Point, SpaceError> {
        self.check_kind(p)?;
        self.check_kind(q)?;
        let t = t.value();
        if t == 0.0 {
            return Ok(p.clone());
        }
        if t == 1.0 {
            return Ok(q.clone());
        }
        Ok(match (p, q) {
            (Point::Euclidean { coords: a }, Point::Euclidean { coords: b }) => Point::Euclidean {
                coords: a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect(),
            },
            (Point::Hyperboloid { coords: a }, Point::Hyperboloid { coords: b }) => {
                Point::Hyperboloid { coords: hyperboloid::geodesic(a, b, t) }
            }
            (
                Point::StarTree { ray: r1, radius: a },
                Point::StarTree { ray: r2, radius: b },
            ) => {
                if r1 == r2 || *a == 0.0 || *b == 0.0 {
                    // Same geodesic ray (possibly through the origin when one
                    // endpoint is the origin itself).
                    let ray = if *a == 0.0 { *r2 } else { *r1 };
                    Point::star_tree(ray, (1.0 - t) * a + t * b)
                } else {
                    // Two-segment path through the origin, parametrized by
                    // arclength fraction.
                    let s = t * (a + b);
                    if s <= *a {
                        Point::star_tree(*r1, a - s)
                    } else {
                        Point::star_tree(*r2, s - a)
                    }
                }
            }
            _ => unreachable!("kinds checked above"),
        })
    }

    /// Quasi-linearization of the vector pair (ab, cd):
    /// (d(a,d)^2 + d(b,c)^2 - d(a,c)^2 - d(b,d)^2) / 2.
    pub fn quasilinearization(
        &self,
        a: &Point,
        b: &Point,
        c: &Point,
        d: &Point,
    ) -> Result<f64, SpaceError> {
        let ad = self.distance(a, d)?;
        let bc = self.distance(b, c)?;
        let ac = self.distance(a, c)?;
        let bd = self.distance(b, d)?;
        Ok(0.5 * (ad * ad + bc * bc - ac * ac - bd * bd))
    }

    /// Validates that a set description is well formed for this space.
    pub fn validate_set(&self, set: &ConvexSet) -> Result<(), SpaceError> {
        match set {
            ConvexSet::WholeSpace => Ok(()),
            ConvexSet::Ball { center, radius } => {
                self.validate_point(center)?;
                if !(*radius > 0.0) {
                    return Err(SpaceError::InvalidSet("ball radius must be > 0".into()));
                }
                Ok(())
            }
            ConvexSet::Segment { a, b } => {
                self.validate_point(a)?;
                self.validate_point(b)?;
                if self.distance(a, b)? <= 1e-12 {
                    return Err(SpaceError::InvalidSet("segment endpoints must be distinct".into()));
                }
                Ok(())
            }
            ConvexSet::Subtree { rays, cap } => {
                let SpaceKind::StarTree { rays: total } = self.kind else {
                    return Err(SpaceError::InvalidSet(
                        "subtree sets only exist on star trees".into(),
                    ));
                };
                if rays.is_empty() {
                    return Err(SpaceError::InvalidSet("subtree needs at least one ray".into()));
                }
                if rays.iter().any(|r| *r >= total) {
                    return Err(SpaceError::InvalidSet("subtree ray out of range".into()));
                }
                if let Some(c) = cap {
                    if !(*c > 0.0) {
                        return Err(SpaceError::InvalidSet("subtree cap must be > 0".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Membership test with a small metric slack.
    pub fn contains(&self, set: &ConvexSet, x: &Point) -> Result<bool, SpaceError> {
        self.check_kind(x)?;
        match set {
            ConvexSet::WholeSpace => Ok(true),
            ConvexSet::Ball { center, radius } => {
                Ok(self.distance(center, x)? <= radius + MEMBERSHIP_TOL)
            }
            ConvexSet::Segment { a, b } => {
                let through = self.distance(a, x)? + self.distance(x, b)?;
                Ok((through - self.distance(a, b)?).abs() <= MEMBERSHIP_TOL)
            }
            ConvexSet::Subtree { rays, cap } => {
                let Point::StarTree { ray, radius } = x else {
                    return Err(self.mismatch(x));
                };
                if *radius <= MEMBERSHIP_TOL {
                    return Ok(true); // origin belongs to every subtree
                }
                let within_cap = cap.is_none_or(|c| *radius <= c + MEMBERSHIP_TOL);
                Ok(rays.contains(ray) && within_cap)
            }
        }
    }

    /// Metric projection onto a closed convex set.
    ///
    /// Balls project along the geodesic from the center; segments use
    /// ternary search on the geodesically convex map t -> d(gamma(t), x)
    /// (200 iterations or interval width <= 1e-12, whichever first).
    pub fn project(&self, set: &ConvexSet, x: &Point) -> Result<Point, SpaceError> {
        self.validate_set(set)?;
        self.check_kind(x)?;
        match set {
            ConvexSet::WholeSpace => Ok(x.clone()),
            ConvexSet::Ball { center, radius } => {
                let d = self.distance(center, x)?;
                if d <= *radius {
                    Ok(x.clone())
                } else {
                    self.geodesic_point(center, x, GeodesicParam::new(radius / d))
                }
            }
            ConvexSet::Segment { a, b } => {
                let t = match self.kind {
                    // t -> d(gamma(t), x) is flat to second order at its
                    // minimum, so value comparisons there drown in rounding
                    // noise. On the manifolds the derivative sign is
                    // available through log maps and crosses zero linearly,
                    // which bisection resolves to near machine precision.
                    SpaceKind::Euclidean { .. } | SpaceKind::Hyperboloid { .. } => {
                        self.segment_param_by_derivative(a, b, x)?
                    }
                    // Tree distances are piecewise linear in t, so the
                    // plain ternary search has no flat region to fight.
                    SpaceKind::StarTree { .. } => {
                        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                        let mut iter = 0;
                        while hi - lo > 1e-12 && iter < 200 {
                            let m1 = lo + (hi - lo) / 3.0;
                            let m2 = hi - (hi - lo) / 3.0;
                            let g1 = self
                                .distance(&self.geodesic_point(a, b, GeodesicParam::new(m1))?, x)?;
                            let g2 = self
                                .distance(&self.geodesic_point(a, b, GeodesicParam::new(m2))?, x)?;
                            if g1 < g2 {
                                hi = m2;
                            } else {
                                lo = m1;
                            }
                            iter += 1;
                        }
                        0.5 * (lo + hi)
                    }
                };
                self.geodesic_point(a, b, GeodesicParam::new(t))
            }
            ConvexSet::Subtree { rays, cap } => {
                let Point::StarTree { ray, radius } = x else {
                    return Err(self.mismatch(x));
                };
                let capped = |r: f64| cap.map_or(r, |c| r.min(c));
                if rays.contains(ray) || *radius == 0.0 {
                    Ok(Point::star_tree(*ray, capped(*radius)))
                } else {
                    // Any path to the subtree passes through the origin, so
                    // the origin is the nearest point.
                    Ok(Point::star_tree(0, 0.0))
                }
            }
        }
    }

    /// Parameter of the segment point nearest to x, found by bisecting the
    /// sign of the objective's derivative along the segment. ψ(t) is the
    /// inner product of the unit tangent toward `b` with log of x: positive
    /// while moving toward b decreases the distance.
    fn segment_param_by_derivative(
        &self,
        a: &Point,
        b: &Point,
        x: &Point,
    ) -> Result<f64, SpaceError> {
        if let (
            Point::Euclidean { coords: pa },
            Point::Euclidean { coords: pb },
            Point::Euclidean { coords: px },
        ) = (a, b, x)
        {
            // Flat case in closed form: the foot of the perpendicular.
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..pa.len() {
                let d = pb[i] - pa[i];
                num += (px[i] - pa[i]) * d;
                den += d * d;
            }
            return Ok((num / den).clamp(0.0, 1.0));
        }
        let psi = |t: f64| -> Result<f64, SpaceError> {
            let g = self.geodesic_point(a, b, GeodesicParam::new(t))?;
            let toward = if t < 1.0 { self.log_map(&g, b)? } else { self.log_map(&g, a)?.scale(-1.0) };
            let lx = self.log_map(&g, x)?;
            let inner = match &g {
                Point::Euclidean { .. } => {
                    toward.0.iter().zip(&lx.0).map(|(u, v)| u * v).sum::<f64>()
                }
                Point::Hyperboloid { coords } => {
                    let _ = coords;
                    hyperboloid::minkowski(&toward.0, &lx.0)
                }
                Point::StarTree { .. } => unreachable!("manifold kinds only"),
            };
            let n = self.tangent_norm(&g, &toward)?;
            Ok(if n > 0.0 { inner / n } else { 0.0 })
        };
        if psi(0.0)? <= 0.0 {
            return Ok(0.0);
        }
        if psi(1.0)? >= 0.0 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if psi(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Signed CAT(0) comparison defect at (x, y, z, t):
    /// (1-t) d^2(x,z) + t d^2(y,z) - t(1-t) d^2(x,y) - d^2((1-t)x + ty, z).
    ///
    /// Nonnegative in every CAT(0) space; identically zero in flat space.
    pub fn check_cat0_inequality(
        &self,
        x: &Point,
        y: &Point,
        z: &Point,
        t: GeodesicParam,
    ) -> Result<f64, SpaceError> {
        let tv = t.value();
        let dxz = self.distance(x, z)?;
        let dyz = self.distance(y, z)?;
        let dxy = self.distance(x, y)?;
        let mid = self.geodesic_point(x, y, t)?;
        let dmz = self.distance(&mid, z)?;
        Ok((1.0 - tv) * dxz * dxz + tv * dyz * dyz - tv * (1.0 - tv) * dxy * dxy - dmz * dmz)
    }

    /// Signed Cauchy-Schwarz defect d(a,b) d(c,d) - <ab, cd>, nonnegative
    /// in every CAT(0) space.
    pub fn check_cauchy_schwarz(
        &self,
        a: &Point,
        b: &Point,
        c: &Point,
        d: &Point,
    ) -> Result<f64, SpaceError> {
        Ok(self.distance(a, b)? * self.distance(c, d)? - self.quasilinearization(a, b, c, d)?)
    }

    /// Inverse of the exponential map at `base` (Euclidean and hyperboloid
    /// only). The returned vector has norm d(base, target).
    pub fn log_map(&self, base: &Point, target: &Point) -> Result<Tangent, SpaceError> {
        self.check_kind(base)?;
        self.check_kind(target)?;
        match (base, target) {
            (Point::Euclidean { coords: a }, Point::Euclidean { coords: b }) => {
                Ok(Tangent(b.iter().zip(a).map(|(t, s)| t - s).collect()))
            }
            (Point::Hyperboloid { coords: a }, Point::Hyperboloid { coords: b }) => {
                Ok(Tangent(hyperboloid::log(a, b)))
            }
            (Point::StarTree { .. }, _) => Err(self.unsupported("log_map")),
            _ => unreachable!("kinds checked above"),
        }
    }

    /// Exponential map at `base` (Euclidean and hyperboloid only).
    pub fn exp_map(&self, base: &Point, v: &Tangent) -> Result<Point, SpaceError> {
        self.check_kind(base)?;
        if v.0.len() != self.tangent_len()? {
            return Err(SpaceError::InvalidPoint(format!(
                "tangent length {} does not match space",
                v.0.len()
            )));
        }
        match base {
            Point::Euclidean { coords } => Ok(Point::Euclidean {
                coords: coords.iter().zip(&v.0).map(|(x, d)| x + d).collect(),
            }),
            Point::Hyperboloid { coords } => {
                Ok(Point::Hyperboloid { coords: hyperboloid::exp(coords, &v.0) })
            }
            Point::StarTree { .. } => Err(self.unsupported("exp_map")),
        }
    }

    /// Riemannian norm of a tangent vector at `base`.
    pub fn tangent_norm(&self, base: &Point, v: &Tangent) -> Result<f64, SpaceError> {
        self.check_kind(base)?;
        match base {
            Point::Euclidean { .. } => Ok(v.0.iter().map(|x| x * x).sum::<f64>().sqrt()),
            Point::Hyperboloid { coords } => Ok(hyperboloid::tangent_norm(coords, &v.0)),
            Point::StarTree { .. } => Err(self.unsupported("tangent_norm")),
        }
    }

    /// Finite surrogate for the asymptotic center: the candidate minimizing
    /// the maximum distance to the tail points. Diagnostic only — the true
    /// asymptotic center is an infimum over the whole space.
    pub fn estimate_asymptotic_center(
        &self,
        tail: &[Point],
        candidates: &[Point],
    ) -> Result<Point, SpaceError> {
        if tail.is_empty() {
            return Err(SpaceError::EmptyInput("asymptotic-center tail"));
        }
        if candidates.is_empty() {
            return Err(SpaceError::EmptyInput("asymptotic-center candidates"));
        }
        let mut best: Option<(f64, &Point)> = None;
        for cand in candidates {
            let mut radius = 0.0_f64;
            for p in tail {
                radius = radius.max(self.distance(cand, p)?);
            }
            match best {
                Some((r, _)) if r <= radius => {}
                _ => best = Some((radius, cand)),
            }
        }
        Ok(best.expect("candidates nonempty").1.clone())
    }
}
