//! Seeded Monte-Carlo sweeps over the geometric identities a CAT(0) space
//! must satisfy: metric axioms, geodesic comparison inequalities,
//! quasi-linearization algebra, Cauchy-Schwarz, and the flat-space
//! identities that single out Euclidean geometry.

use serde::{Deserialize, Serialize};

use super::{GeodesicParam, Point, SpaceError, SpaceHandle, SpaceKind};
use crate::exec::{map_collect, ExecMode};
use crate::sampling::{sample_ball, seeded_rng};
use rand::Rng;

/// Scales one distance inside the geodesic comparison checks for a single
/// sample index. Self-test hook for the checker's failure path: a distorted
/// metric must be reported with a witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub index: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSweepConfig {
    pub samples: usize,
    pub seed: u64,
    /// Radius of the sampled ball around the basepoint.
    pub radius: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub exec: ExecMode,
    #[serde(default)]
    pub distortion: Option<Distortion>,
}

impl Default for SpaceSweepConfig {
    fn default() -> Self {
        SpaceSweepConfig {
            samples: 10_000,
            seed: 0,
            radius: 2.0,
            tolerance: 1e-9,
            exec: ExecMode::default(),
            distortion: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryCheck {
    MetricSymmetry,
    MetricIdentity,
    TriangleInequality,
    GeodesicEndpointDistances,
    GeodesicSpeed,
    ConvexityOfDistance,
    GeodesicContraction,
    ComparisonInequality,
    FlatComparisonEquality,
    QuasilinearizationSymmetry,
    QuasilinearizationAntisymmetry,
    QuasilinearizationAdditivity,
    CauchySchwarz,
    FlatAffineIdentity,
}

impl GeometryCheck {
    fn for_kind(kind: SpaceKind) -> Vec<GeometryCheck> {
        use GeometryCheck::*;
        let mut v = vec![
            MetricSymmetry,
            MetricIdentity,
            TriangleInequality,
            GeodesicEndpointDistances,
            GeodesicSpeed,
            ConvexityOfDistance,
            GeodesicContraction,
            ComparisonInequality,
            QuasilinearizationSymmetry,
            QuasilinearizationAntisymmetry,
            QuasilinearizationAdditivity,
            CauchySchwarz,
        ];
        if matches!(kind, SpaceKind::Euclidean { .. }) {
            v.push(FlatComparisonEquality);
            v.push(FlatAffineIdentity);
        }
        v
    }
}

/// Outcome of one check over the whole sweep. `worst_violation <= tolerance`
/// means the identity held on every sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCheck {
    pub check: GeometryCheck,
    pub samples: usize,
    pub worst_violation: f64,
    pub witness: Option<Vec<Point>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSweepReport {
    pub space: SpaceKind,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<SweepCheck>,
}

struct SweepSample {
    pts: [Point; 5],
    t: f64,
    s: f64,
    lam: f64,
    distance_scale: f64,
}

/// Runs every geometry check on seeded random samples and reports the worst
/// signed violation per check (positive = identity broken by that much).
pub fn run_space_sweep(
    space: &SpaceHandle,
    cfg: &SpaceSweepConfig,
) -> Result<SpaceSweepReport, SpaceError> {
    let checks = GeometryCheck::for_kind(space.kind());
    let mut rng = seeded_rng(cfg.seed);
    let base = space.basepoint();
    let samples: Vec<SweepSample> = (0..cfg.samples)
        .map(|i| {
            let pts = [
                sample_ball(space, &mut rng, &base, cfg.radius),
                sample_ball(space, &mut rng, &base, cfg.radius),
                sample_ball(space, &mut rng, &base, cfg.radius),
                sample_ball(space, &mut rng, &base, cfg.radius),
                sample_ball(space, &mut rng, &base, cfg.radius),
            ];
            let distance_scale = match cfg.distortion {
                Some(d) if d.index == i => d.scale,
                _ => 1.0,
            };
            SweepSample { pts, t: rng.gen(), s: rng.gen(), lam: rng.gen(), distance_scale }
        })
        .collect();

    let rows: Vec<Vec<f64>> = map_collect(cfg.exec, &samples, |sample| {
        checks.iter().map(|c| evaluate(space, *c, sample)).collect()
    });

    let mut out = Vec::with_capacity(checks.len());
    for (ci, check) in checks.iter().enumerate() {
        let mut worst = f64::NEG_INFINITY;
        let mut at = 0usize;
        for (si, row) in rows.iter().enumerate() {
            if row[ci] > worst {
                worst = row[ci];
                at = si;
            }
        }
        let witness = if worst > cfg.tolerance {
            Some(witness_points(*check, &samples[at]))
        } else {
            None
        };
        out.push(SweepCheck { check: *check, samples: cfg.samples, worst_violation: worst, witness });
    }
    let passed = out.iter().all(|c| c.worst_violation <= cfg.tolerance);
    Ok(SpaceSweepReport { space: space.kind(), tolerance: cfg.tolerance, passed, checks: out })
}

fn evaluate(space: &SpaceHandle, check: GeometryCheck, s: &SweepSample) -> f64 {
    // Samples come from the same handle, so the space ops cannot fail.
    let d = |p: &Point, q: &Point| space.distance(p, q).expect("same-kind points");
    let quasi = |a: &Point, b: &Point, c: &Point, e: &Point| {
        space.quasilinearization(a, b, c, e).expect("same-kind points")
    };
    let geo = |p: &Point, q: &Point, t: f64| {
        space.geodesic_point(p, q, GeodesicParam::new(t)).expect("same-kind points")
    };
    let [a, b, c, e, x] = &s.pts;
    match check {
        GeometryCheck::MetricSymmetry => (d(a, b) - d(b, a)).abs(),
        GeometryCheck::MetricIdentity => d(a, a).abs(),
        GeometryCheck::TriangleInequality => d(a, c) - d(a, b) - d(b, c),
        GeometryCheck::GeodesicEndpointDistances => {
            let g = geo(a, b, s.t);
            let dab = d(a, b);
            (d(a, &g) - s.t * dab).abs().max((d(b, &g) - (1.0 - s.t) * dab).abs())
        }
        GeometryCheck::GeodesicSpeed => {
            (d(&geo(a, b, s.t), &geo(a, b, s.s)) - (s.t - s.s).abs() * d(a, b)).abs()
        }
        GeometryCheck::ConvexityOfDistance => {
            d(&geo(a, b, s.t), c) - (1.0 - s.t) * d(a, c) - s.t * d(b, c)
        }
        GeometryCheck::GeodesicContraction => {
            d(&geo(c, a, s.t), &geo(c, b, s.t)) - s.t * d(a, b)
        }
        GeometryCheck::ComparisonInequality => -comparison_defect(space, s),
        GeometryCheck::FlatComparisonEquality => comparison_defect(space, s).abs(),
        GeometryCheck::QuasilinearizationSymmetry => (quasi(a, b, c, e) - quasi(c, e, a, b)).abs(),
        GeometryCheck::QuasilinearizationAntisymmetry => {
            (quasi(a, b, c, e) + quasi(b, a, c, e)).abs()
        }
        GeometryCheck::QuasilinearizationAdditivity => {
            (quasi(a, x, c, e) + quasi(x, b, c, e) - quasi(a, b, c, e)).abs()
        }
        GeometryCheck::CauchySchwarz => quasi(a, b, c, e) - d(a, b) * d(c, e),
        GeometryCheck::FlatAffineIdentity => {
            let mix = geo(c, e, 1.0 - s.lam); // lam*c + (1-lam)*e
            (quasi(a, b, a, &mix)
                - s.lam * quasi(a, b, a, c)
                - (1.0 - s.lam) * quasi(a, b, a, e))
            .abs()
        }
    }
}

/// Signed comparison defect with the distortion hook applied to d(x, y).
fn comparison_defect(space: &SpaceHandle, s: &SweepSample) -> f64 {
    let [a, b, c, ..] = &s.pts;
    let t = s.t;
    let dxz = space.distance(a, c).expect("same-kind points");
    let dyz = space.distance(b, c).expect("same-kind points");
    let dxy = space.distance(a, b).expect("same-kind points") * s.distance_scale;
    let mid = space.geodesic_point(a, b, GeodesicParam::new(t)).expect("same-kind points");
    let dmz = space.distance(&mid, c).expect("same-kind points");
    (1.0 - t) * dxz * dxz + t * dyz * dyz - t * (1.0 - t) * dxy * dxy - dmz * dmz
}

fn witness_points(check: GeometryCheck, s: &SweepSample) -> Vec<Point> {
    use GeometryCheck::*;
    let n = match check {
        MetricIdentity => 1,
        MetricSymmetry | GeodesicEndpointDistances | GeodesicSpeed => 2,
        TriangleInequality | ConvexityOfDistance | GeodesicContraction | ComparisonInequality
        | FlatComparisonEquality => 3,
        QuasilinearizationSymmetry | QuasilinearizationAntisymmetry | CauchySchwarz
        | FlatAffineIdentity => 4,
        QuasilinearizationAdditivity => 5,
    };
    s.pts[..n].to_vec()
}
