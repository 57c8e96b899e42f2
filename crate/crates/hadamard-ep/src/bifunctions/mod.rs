//! Bifunctions f : K x K -> R, the built-in families used throughout, and
//! finite-sample checkers for the monotonicity conditions solvers rely on.
//!
//! Checkers are sampled falsifiers, not proofs: a report with
//! `worst_violation <= 0` means no violation was found at the tested sample
//! count. Semicontinuity cannot be falsified from finitely many samples, so
//! no checker for it exists; convexity along geodesics is checked through
//! the midpoint inequality instead. Coercivity quantifies over unbounded
//! sequences and is likewise not sample-checkable.

mod checks;

pub use checks::{check_property, BifunctionProperty, CheckConfig, CheckError, PropertyReport};

use std::sync::Arc;

use crate::spaces::{ConvexSet, GeodesicParam, Point, SpaceHandle, Tangent};

type EvalFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;
type PotentialFn = dyn Fn(&Point) -> f64 + Send + Sync;
type GradFn = dyn Fn(&Point) -> Tangent + Send + Sync;
type MapFn = dyn Fn(&Point) -> Point + Send + Sync;
/// Closed-form resolvent (set, anchor, lambda) -> point, when one is known
/// for that feasible set.
type AnalyticFn = dyn Fn(&ConvexSet, &Point, f64) -> Option<Point> + Send + Sync;

/// Structure hints a bifunction may carry. Solvers use them to pick a
/// resolvent strategy; none of them changes what `eval` computes.
#[derive(Clone, Default)]
pub struct Hints {
    /// Undermonotonicity constant: f(x,y) + f(y,x) <= theta d^2(x,y).
    pub theta: Option<f64>,
    pub potential: Option<Arc<PotentialFn>>,
    pub potential_grad: Option<Arc<GradFn>>,
    pub map: Option<Arc<MapFn>>,
    pub analytic_resolvent: Option<Arc<AnalyticFn>>,
}

/// A bifunction over one concrete space.
///
/// Evaluation must be pure; points handed to `eval` must belong to the
/// bifunction's space. Cloning is cheap (shared closures).
#[derive(Clone)]
pub struct Bifunction {
    space: SpaceHandle,
    eval: Arc<EvalFn>,
    hints: Hints,
}

impl std::fmt::Debug for Bifunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bifunction")
            .field("space", &self.space)
            .field("theta", &self.hints.theta)
            .field("has_potential", &self.hints.potential.is_some())
            .field("has_map", &self.hints.map.is_some())
            .field("has_analytic", &self.hints.analytic_resolvent.is_some())
            .finish()
    }
}

impl Bifunction {
    pub fn new(
        space: SpaceHandle,
        eval: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Bifunction { space, eval: Arc::new(eval), hints: Hints::default() }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.hints.theta = Some(theta);
        self
    }

    pub fn space(&self) -> SpaceHandle {
        self.space
    }

    pub fn hints(&self) -> &Hints {
        &self.hints
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        (self.eval)(x, y)
    }

    /// The identically-zero bifunction. Its regularized subproblem is the
    /// metric projection onto K, which is also its closed form.
    pub fn zero(space: SpaceHandle) -> Self {
        let mut b = Bifunction::new(space, |_, _| 0.0);
        b.hints.theta = Some(0.0);
        b.hints.potential = Some(Arc::new(|_| 0.0));
        b.hints.analytic_resolvent =
            Some(Arc::new(move |set, anchor, _lambda| space.project(set, anchor).ok()));
        b
    }

    /// Minimization bifunction f(x,y) = phi(y) - phi(x) for a convex
    /// potential. Satisfies the vanishing diagonal exactly and is monotone
    /// with equality: f(x,y) + f(y,x) = 0.
    pub fn from_potential(
        space: SpaceHandle,
        phi: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        grad: Option<Arc<GradFn>>,
    ) -> Self {
        let phi = Arc::new(phi);
        let p = Arc::clone(&phi) as Arc<PotentialFn>;
        let mut b = Bifunction::new(space, move |x, y| p(y) - p(x));
        b.hints.theta = Some(0.0);
        b.hints.potential = Some(phi);
        b.hints.potential_grad = grad;
        b
    }

    /// phi = d^2(., anchor) / 2. The regularized subproblem has the closed
    /// form geodesic_point(x_bar, anchor, 1/(1+lambda)) on the whole space
    /// in every model; in flat space it composes with the projection onto K
    /// because there the objective is exactly a scaled squared distance
    /// from that geodesic point.
    pub fn half_sq_dist(space: SpaceHandle, anchor: Point) -> Self {
        space.validate_point(&anchor).expect("anchor must belong to the space");
        let a = anchor.clone();
        let phi = move |x: &Point| {
            let d = space.distance(x, &a).expect("same-kind point");
            0.5 * d * d
        };
        let grad = manifold_grad(space, {
            let a = anchor.clone();
            move |x: &Point, s: &SpaceHandle| s.log_map(x, &a).map(|v| v.scale(-1.0))
        });
        let mut b = Bifunction::from_potential(space, phi, grad);
        let a = anchor;
        b.hints.analytic_resolvent = Some(Arc::new(move |set, x_bar, lambda| {
            let t = GeodesicParam::new(1.0 / (1.0 + lambda));
            let unconstrained = space.geodesic_point(x_bar, &a, t).ok()?;
            match set {
                ConvexSet::WholeSpace => Some(unconstrained),
                _ if matches!(space.kind(), crate::spaces::SpaceKind::Euclidean { .. }) => {
                    space.project(set, &unconstrained).ok()
                }
                _ => None,
            }
        }));
        b
    }

    /// phi(x) = sum_i w_i d^2(x, a_i) / 2, the weighted Frechet-mean
    /// objective.
    pub fn frechet_mean(space: SpaceHandle, anchors: Vec<Point>, weights: Vec<f64>) -> Self {
        assert!(!anchors.is_empty(), "frechet_mean needs at least one anchor");
        assert_eq!(anchors.len(), weights.len(), "one weight per anchor");
        for a in &anchors {
            space.validate_point(a).expect("anchors must belong to the space");
        }
        let pts = anchors.clone();
        let ws = weights.clone();
        let phi = move |x: &Point| {
            pts.iter()
                .zip(&ws)
                .map(|(a, w)| {
                    let d = space.distance(x, a).expect("same-kind point");
                    0.5 * w * d * d
                })
                .sum()
        };
        let grad = manifold_grad(space, move |x: &Point, s: &SpaceHandle| {
            let mut g = Tangent::zero(s.tangent_len()?);
            for (a, w) in anchors.iter().zip(&weights) {
                g = g.add(&s.log_map(x, a)?.scale(-w));
            }
            Ok(g)
        });
        Bifunction::from_potential(space, phi, grad)
    }

    /// phi(x) = d^2(x, S) for a geodesic segment S. In flat space the
    /// regularized subproblem over the whole space has the closed form
    /// x + (2/(2+lambda)) (P_S x - x).
    pub fn sq_dist_to_segment(space: SpaceHandle, a: Point, b: Point) -> Self {
        let seg = ConvexSet::Segment { a, b };
        space.validate_set(&seg).expect("segment must be valid for the space");
        let s1 = seg.clone();
        let phi = move |x: &Point| {
            let p = space.project(&s1, x).expect("validated segment");
            let d = space.distance(x, &p).expect("same-kind point");
            d * d
        };
        let s2 = seg.clone();
        let grad = manifold_grad(space, move |x: &Point, s: &SpaceHandle| {
            let p = s.project(&s2, x)?;
            s.log_map(x, &p).map(|v| v.scale(-2.0))
        });
        let mut b = Bifunction::from_potential(space, phi, grad);
        if matches!(space.kind(), crate::spaces::SpaceKind::Euclidean { .. }) {
            b.hints.analytic_resolvent = Some(Arc::new(move |set, x_bar, lambda| {
                if !matches!(set, ConvexSet::WholeSpace) {
                    return None;
                }
                let foot = space.project(&seg, x_bar).ok()?;
                let t = GeodesicParam::new(2.0 / (2.0 + lambda));
                space.geodesic_point(x_bar, &foot, t).ok()
            }));
        }
        b
    }

    /// Variational-inequality bifunction f(x,y) = <(Tx -> x), (x -> y)> for
    /// a map T of the space into itself. The diagonal vanishes exactly
    /// because the second vector degenerates at y = x.
    pub fn from_map(
        space: SpaceHandle,
        map: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        let map: Arc<MapFn> = Arc::new(map);
        let m = Arc::clone(&map);
        let mut b = Bifunction::new(space, move |x, y| {
            if x == y {
                return 0.0;
            }
            let tx = m(x);
            space.quasilinearization(&tx, x, x, y).expect("same-kind points")
        });
        b.hints.map = Some(map);
        b
    }
}

/// Wraps a gradient oracle for manifold kinds, returning `None` on the star
/// tree where there is no tangent space.
fn manifold_grad(
    space: SpaceHandle,
    g: impl Fn(&Point, &SpaceHandle) -> Result<Tangent, crate::spaces::SpaceError>
        + Send
        + Sync
        + 'static,
) -> Option<Arc<GradFn>> {
    if matches!(space.kind(), crate::spaces::SpaceKind::StarTree { .. }) {
        return None;
    }
    Some(Arc::new(move |x: &Point| g(x, &space).expect("manifold gradient")))
}
