//! Sampled monotonicity checkers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Bifunction;
use crate::exec::{map_collect, ExecMode};
use crate::sampling::SetSampler;
use crate::spaces::{ConvexSet, GeodesicParam, Point, SpaceError, SpaceHandle};
use rand::Rng;

/// Pairs closer than this are skipped in ratio-based estimates to avoid 0/0.
const MIN_SEPARATION: f64 = 1e-6;
/// Rounds of the iterated-segment construction approximating the geodesic
/// convex hull of a finite set.
const HULL_ROUNDS: usize = 3;
const MAX_CYCLE: usize = 6;
const MAX_FINITE_SET: usize = 4;
const WITNESS_CAP: usize = 5;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("checker drew no usable samples (all degenerate)")]
    NoUsableSamples,
    #[error("property {0:?} is checked through the resolvent module, not here")]
    UnsupportedProperty(BifunctionProperty),
}

/// Conditions the checkers can probe. Ratio-based variants also report an
/// estimated modulus (`estimate` in the report).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifunctionProperty {
    /// f(x,x) = 0.
    VanishingDiagonal,
    /// f(x,y) + f(y,x) <= 0.
    Monotone,
    /// f(x,y) >= 0 implies f(y,x) <= 0.
    PseudoMonotone,
    /// f(x,y) + f(y,x) <= theta d^2(x,y); estimates the smallest such theta.
    UnderMonotone,
    /// f(x,y) + f(y,x) <= -alpha d^2(x,y); estimates the largest alpha.
    StronglyMonotone,
    /// f(x,y) >= 0 implies f(y,x) <= -beta d^2(x,y); estimates beta.
    StronglyPseudoMonotone,
    /// Sums over sampled cycles are nonpositive.
    CyclicMonotone,
    /// min over a finite sampled set A of f(x, y) <= 0 for y in the sampled
    /// convex hull of A.
    ProperlyQuasiMonotone,
    /// f(x, .) satisfies the geodesic midpoint convexity inequality.
    MidpointConvexInSecond,
    /// <(x -> z), (Jx -> Jz)> >= d^2(Jx, Jz) for the resolvent map J.
    /// Checked by the resolvent module.
    FirmlyNonexpansive,
    /// <(x -> p), (Jx -> p)> >= d^2(Jx, p) for solutions p. Checked by the
    /// resolvent module.
    QuasiFirmlyNonexpansive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
    /// Ambient sampling radius for unbounded feasible sets.
    pub radius: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub exec: ExecMode,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { samples: 10_000, seed: 0, radius: 2.0, tolerance: 1e-8, exec: ExecMode::default() }
    }
}

/// Result of one sampled property check.
///
/// `worst_violation <= 0` means no violation was found at the tested
/// tolerance; `witnesses` holds the point tuples behind the worst
/// violations (capped). For the modulus-estimating properties, `estimate`
/// carries theta-hat, alpha-hat, or beta-hat.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: BifunctionProperty,
    pub samples: usize,
    pub worst_violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    pub witnesses: Vec<Vec<Point>>,
}

/// One drawn sample: the point tuple a property needs.
struct Draw {
    pts: Vec<Point>,
}

/// Evaluates the defining inequality of `property` on seeded samples from K
/// and reports the worst signed violation (positive = broken).
pub fn check_property(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    property: BifunctionProperty,
    cfg: &CheckConfig,
) -> Result<PropertyReport, CheckError> {
    let mut sampler = SetSampler::new(space, set, cfg.radius, cfg.seed)?;
    let mut rng = crate::sampling::seeded_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);

    let draws: Vec<Draw> = (0..cfg.samples)
        .map(|_| {
            let pts = match property {
                BifunctionProperty::VanishingDiagonal => vec![sampler.sample()],
                BifunctionProperty::Monotone
                | BifunctionProperty::PseudoMonotone
                | BifunctionProperty::UnderMonotone
                | BifunctionProperty::StronglyMonotone
                | BifunctionProperty::StronglyPseudoMonotone => {
                    vec![sampler.sample(), sampler.sample()]
                }
                BifunctionProperty::CyclicMonotone => {
                    let n = rng.gen_range(2..=MAX_CYCLE);
                    (0..n).map(|_| sampler.sample()).collect()
                }
                BifunctionProperty::ProperlyQuasiMonotone => {
                    let n = rng.gen_range(2..=MAX_FINITE_SET);
                    let mut pts: Vec<Point> = (0..n).map(|_| sampler.sample()).collect();
                    // Iterated geodesic combinations approximate the hull;
                    // the final combination is the probe point y.
                    let mut pool = pts.clone();
                    for _ in 0..HULL_ROUNDS {
                        let i = rng.gen_range(0..pool.len());
                        let j = rng.gen_range(0..pool.len());
                        let t = GeodesicParam::new(rng.gen());
                        let w = space
                            .geodesic_point(&pool[i], &pool[j], t)
                            .expect("samples share the space");
                        pool.push(w);
                    }
                    pts.push(pool.pop().expect("pool nonempty"));
                    pts
                }
                BifunctionProperty::MidpointConvexInSecond => {
                    vec![sampler.sample(), sampler.sample(), sampler.sample()]
                }
                BifunctionProperty::FirmlyNonexpansive
                | BifunctionProperty::QuasiFirmlyNonexpansive => {
                    return Err(CheckError::UnsupportedProperty(property))
                }
            };
            Ok(Draw { pts })
        })
        .collect::<Result<_, CheckError>>()?;

    let violations: Vec<Option<f64>> =
        map_collect(cfg.exec, &draws, |d| violation(f, space, property, d));

    let mut worst = f64::NEG_INFINITY;
    let mut used = 0usize;
    let mut flagged: Vec<(f64, usize)> = Vec::new();
    for (i, v) in violations.iter().enumerate() {
        let Some(v) = *v else { continue };
        used += 1;
        if v > worst {
            worst = v;
        }
        if v > cfg.tolerance {
            flagged.push((v, i));
        }
    }
    if used == 0 {
        return Err(CheckError::NoUsableSamples);
    }
    flagged.sort_by(|a, b| b.0.total_cmp(&a.0));
    let witnesses: Vec<Vec<Point>> =
        flagged.iter().take(WITNESS_CAP).map(|(_, i)| draws[*i].pts.clone()).collect();

    let estimate = match property {
        BifunctionProperty::UnderMonotone => Some(worst.max(0.0)),
        BifunctionProperty::StronglyMonotone | BifunctionProperty::StronglyPseudoMonotone => {
            Some(-worst)
        }
        _ => None,
    };
    // For the modulus estimates the raw ratio is the quantity of interest;
    // the violation against a declared theta is only meaningful with a hint.
    let worst_violation = match property {
        BifunctionProperty::UnderMonotone => match f.hints().theta {
            Some(theta) => worst.max(0.0) - theta,
            None => 0.0,
        },
        _ => worst,
    };

    Ok(PropertyReport { property, samples: used, worst_violation, estimate, witnesses })
}

/// Signed violation for one draw, or `None` when the draw is degenerate for
/// this property (e.g. coincident pair in a ratio estimate).
fn violation(
    f: &Bifunction,
    space: &SpaceHandle,
    property: BifunctionProperty,
    draw: &Draw,
) -> Option<f64> {
    let d = |p: &Point, q: &Point| space.distance(p, q).expect("samples share the space");
    match property {
        BifunctionProperty::VanishingDiagonal => {
            let x = &draw.pts[0];
            Some(f.eval(x, x).abs())
        }
        BifunctionProperty::Monotone => {
            let (x, y) = (&draw.pts[0], &draw.pts[1]);
            Some(f.eval(x, y) + f.eval(y, x))
        }
        BifunctionProperty::PseudoMonotone => {
            let (x, y) = (&draw.pts[0], &draw.pts[1]);
            // Check the implication in both orientations of the pair.
            let mut worst = f64::NEG_INFINITY;
            let mut applicable = false;
            if f.eval(x, y) >= 0.0 {
                worst = worst.max(f.eval(y, x));
                applicable = true;
            }
            if f.eval(y, x) >= 0.0 {
                worst = worst.max(f.eval(x, y));
                applicable = true;
            }
            applicable.then_some(worst)
        }
        BifunctionProperty::UnderMonotone | BifunctionProperty::StronglyMonotone => {
            let (x, y) = (&draw.pts[0], &draw.pts[1]);
            let dist = d(x, y);
            (dist >= MIN_SEPARATION).then(|| (f.eval(x, y) + f.eval(y, x)) / (dist * dist))
        }
        BifunctionProperty::StronglyPseudoMonotone => {
            let (x, y) = (&draw.pts[0], &draw.pts[1]);
            let dist = d(x, y);
            if dist < MIN_SEPARATION {
                return None;
            }
            let d2 = dist * dist;
            let mut worst = f64::NEG_INFINITY;
            let mut applicable = false;
            if f.eval(x, y) >= 0.0 {
                worst = worst.max(f.eval(y, x) / d2);
                applicable = true;
            }
            if f.eval(y, x) >= 0.0 {
                worst = worst.max(f.eval(x, y) / d2);
                applicable = true;
            }
            applicable.then_some(worst)
        }
        BifunctionProperty::CyclicMonotone => {
            let n = draw.pts.len();
            let mut sum = 0.0;
            for i in 0..n {
                sum += f.eval(&draw.pts[i], &draw.pts[(i + 1) % n]);
            }
            Some(sum)
        }
        BifunctionProperty::ProperlyQuasiMonotone => {
            let (set_a, y) = draw.pts.split_at(draw.pts.len() - 1);
            let y = &y[0];
            let min = set_a.iter().map(|x| f.eval(x, y)).fold(f64::INFINITY, f64::min);
            Some(min)
        }
        BifunctionProperty::MidpointConvexInSecond => {
            let (x, y, z) = (&draw.pts[0], &draw.pts[1], &draw.pts[2]);
            let mid = space
                .geodesic_point(y, z, GeodesicParam::new(0.5))
                .expect("samples share the space");
            Some(f.eval(x, &mid) - 0.5 * f.eval(x, y) - 0.5 * f.eval(x, z))
        }
        BifunctionProperty::FirmlyNonexpansive | BifunctionProperty::QuasiFirmlyNonexpansive => {
            unreachable!("rejected before sampling")
        }
    }
}
