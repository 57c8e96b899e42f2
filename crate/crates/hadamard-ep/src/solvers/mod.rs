//! Outer solvers for EP(f, K): the inexact proximal-point iteration and its
//! Halpern regularization.
//!
//! Each proximal step solves the regularized subproblem at an anchor y_k
//! within distance e_k of the current iterate; with summable e_k the
//! iterates are quasi-Fejer monotone toward every solution and their steps
//! vanish. The Halpern variant averages each subproblem solution toward a
//! fixed point u with vanishing harmonic weights, which forces strong
//! convergence to the projection of u onto the solution set.
//!
//! A single solve is strictly sequential (each iterate depends on the
//! previous one); distinct solves may run concurrently, and traces are
//! built append-only and handed off whole.

mod schedule;
mod trace;

pub use schedule::{AlphaSchedule, ErrorSchedule, LambdaSchedule, Schedule, ScheduleError};
pub use trace::{g17, IterateTrace, TerminalStatus, TraceRecord};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bifunctions::Bifunction;
use crate::exec::ExecMode;
use crate::resolvent::{residual, solve_resolvent, ResolventRequest, Strategy};
use crate::sampling::{sample_ball, seeded_rng};
use crate::spaces::{ConvexSet, GeodesicParam, Point, SpaceError, SpaceHandle};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventDefaults {
    pub strategy: Strategy,
    pub tol: f64,
    pub max_inner: usize,
    #[serde(default = "default_residual_samples")]
    pub residual_samples: usize,
}

fn default_residual_samples() -> usize {
    200
}

impl Default for ResolventDefaults {
    fn default() -> Self {
        ResolventDefaults {
            strategy: Strategy::Analytic,
            tol: 1e-8,
            max_inner: 100_000,
            residual_samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub x0: Point,
    pub lambda: Schedule,
    /// Upper bound lambda_bar for the lambda schedule.
    pub lambda_bar: f64,
    /// Declared undermonotonicity constant; falls back to the bifunction's
    /// hint, then to 0.
    #[serde(default)]
    pub theta: Option<f64>,
    pub errors: Schedule,
    /// Halpern only.
    #[serde(default)]
    pub alpha: Option<Schedule>,
    /// Halpern only: the fixed averaging target u.
    #[serde(default)]
    pub anchor_u: Option<Point>,
    pub max_outer: usize,
    pub tol_step: f64,
    pub resolvent: ResolventDefaults,
    pub rng_seed: u64,
    #[serde(default)]
    pub exec: ExecMode,
}

impl SolveConfig {
    /// Exact proximal point with constant lambda = 1 and harmonic Halpern
    /// weights; satisfies every schedule hypothesis by construction.
    pub fn exact(x0: Point, max_outer: usize) -> Self {
        SolveConfig {
            x0,
            lambda: Schedule::Constant { value: 1.0 },
            lambda_bar: 1.0,
            theta: None,
            errors: Schedule::Constant { value: 0.0 },
            alpha: Some(Schedule::Harmonic),
            anchor_u: None,
            max_outer,
            tol_step: 1e-6,
            resolvent: ResolventDefaults::default(),
            rng_seed: 0,
            exec: ExecMode::default(),
        }
    }

    /// Default schedules for a bifunction with undermonotonicity constant
    /// `theta`: lambda held at max(1, 2 theta), exact steps, harmonic
    /// Halpern weights.
    pub fn default_for_theta(x0: Point, theta: f64, max_outer: usize) -> Self {
        let lam = (2.0 * theta).max(1.0);
        let mut config = Self::exact(x0, max_outer);
        config.lambda = Schedule::Constant { value: lam };
        config.lambda_bar = lam;
        config.theta = Some(theta);
        config
    }
}

fn effective_theta(f: &Bifunction, config: &SolveConfig) -> f64 {
    config.theta.or(f.hints().theta).unwrap_or(0.0)
}

fn validate_common(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    config: &SolveConfig,
) -> Result<(LambdaSchedule, ErrorSchedule), SolveError> {
    if f.space() != *space {
        return Err(SolveError::InvalidConfig("bifunction built for a different space".into()));
    }
    space.validate_set(set)?;
    space.validate_point(&config.x0)?;
    if config.max_outer < 1 {
        return Err(SolveError::InvalidConfig("max_outer must be >= 1".into()));
    }
    if !(config.tol_step > 0.0) {
        return Err(SolveError::InvalidConfig("tol_step must be > 0".into()));
    }
    let theta = effective_theta(f, config);
    let lambda = LambdaSchedule::validate(&config.lambda, theta, config.lambda_bar, config.max_outer)?;
    let errors = ErrorSchedule::validate(&config.errors)?;
    Ok((lambda, errors))
}

fn subproblem_request<'a>(
    f: &'a Bifunction,
    space: &'a SpaceHandle,
    set: &'a ConvexSet,
    config: &SolveConfig,
    anchor: Point,
    lambda: f64,
    iter: usize,
) -> ResolventRequest<'a> {
    let mut req = ResolventRequest::new(f, space, set, anchor, lambda, config.resolvent.strategy);
    req.tol = config.resolvent.tol;
    req.max_inner = config.resolvent.max_inner;
    req.residual_samples = config.resolvent.residual_samples;
    req.seed = config.rng_seed.wrapping_add(1_000_003 * (iter as u64 + 1));
    req.exec = config.exec;
    req
}

/// Moves from `x` toward a seeded random probe by exactly min(budget, reach):
/// the inexactness model for y_k. Zero budget draws nothing and returns `x`.
fn perturb(
    space: &SpaceHandle,
    rng: &mut rand_chacha::ChaCha8Rng,
    x: &Point,
    budget: f64,
) -> Result<Point, SpaceError> {
    if budget <= 0.0 {
        return Ok(x.clone());
    }
    let probe = sample_ball(space, rng, x, 1.0 + budget);
    let reach = space.distance(x, &probe)?;
    if reach <= 1e-15 {
        return Ok(x.clone());
    }
    space.geodesic_point(x, &probe, GeodesicParam::new(budget.min(reach) / reach))
}

/// Inexact proximal-point iteration. The returned trace records, for each
/// outer index k, the iterate, its step, the sampled subproblem residual,
/// and the schedule values applied.
pub fn run_ppa(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    config: &SolveConfig,
    reference: Option<&Point>,
) -> Result<IterateTrace, SolveError> {
    let (lambda, errors) = validate_common(f, space, set, config)?;
    let mut rng = seeded_rng(config.rng_seed);
    let mut x = config.x0.clone();
    let mut records = Vec::new();
    let mut status = TerminalStatus::MaxIter;
    let mut failure = None;

    for iter in 0..config.max_outer {
        let e = errors.value(iter);
        let lam = lambda.value(iter);
        let y = perturb(space, &mut rng, &x, e)?;
        let req = subproblem_request(f, space, set, config, y, lam, iter);
        let result = match solve_resolvent(&req) {
            Ok(r) => r,
            Err(err) => {
                status = TerminalStatus::SubproblemFailed;
                failure = Some(err.to_string());
                break;
            }
        };
        let step = space.distance(&x, &result.point)?;
        x = result.point;
        records.push(TraceRecord {
            k: iter + 1,
            point: x.clone(),
            step,
            residual: result.residual,
            dist_to_ref: reference.map(|r| space.distance(&x, r)).transpose()?,
            e_applied: e,
            lambda: lam,
            alpha: None,
        });
        if step <= config.tol_step && result.residual >= -10.0 * config.resolvent.tol {
            status = TerminalStatus::Converged;
            break;
        }
    }

    Ok(IterateTrace { initial: config.x0.clone(), records, status, final_point: x, failure })
}

/// Halpern-regularized iteration: each subproblem solution is averaged
/// toward the fixed anchor u with weight alpha_k.
pub fn run_halpern(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    config: &SolveConfig,
    reference: Option<&Point>,
) -> Result<IterateTrace, SolveError> {
    let (lambda, _) = validate_common(f, space, set, config)?;
    let alpha_schedule = config
        .alpha
        .as_ref()
        .ok_or_else(|| SolveError::InvalidConfig("halpern needs an alpha schedule".into()))?;
    let alpha = AlphaSchedule::validate(alpha_schedule)?;
    let u = config
        .anchor_u
        .clone()
        .ok_or_else(|| SolveError::InvalidConfig("halpern needs the anchor point u".into()))?;
    space.validate_point(&u)?;

    let mut x = config.x0.clone();
    let mut records = Vec::new();
    let mut status = TerminalStatus::MaxIter;
    let mut failure = None;

    for iter in 0..config.max_outer {
        let k = iter + 1;
        let lam = lambda.value(iter);
        let a = alpha.value(k);
        let req = subproblem_request(f, space, set, config, x.clone(), lam, iter);
        let y = match solve_resolvent(&req) {
            Ok(r) => r,
            Err(err) => {
                status = TerminalStatus::SubproblemFailed;
                failure = Some(err.to_string());
                break;
            }
        };
        // x_k = a u (+) (1 - a) y_k
        let next = space.geodesic_point(&u, &y.point, GeodesicParam::new(1.0 - a))?;
        let step = space.distance(&x, &next)?;
        x = next;
        records.push(TraceRecord {
            k,
            point: x.clone(),
            step,
            residual: y.residual,
            dist_to_ref: reference.map(|r| space.distance(&x, r)).transpose()?,
            e_applied: 0.0,
            lambda: lam,
            alpha: Some(a),
        });
        if step <= config.tol_step && a <= config.tol_step {
            status = TerminalStatus::Converged;
            break;
        }
    }

    Ok(IterateTrace { initial: config.x0.clone(), records, status, final_point: x, failure })
}

/// Renders a resolvent path as an iterate trace (row k holds the point at
/// the k-th lambda, its residual, and the step from the previous one), so
/// paths share the CSV format of the outer solvers.
pub fn path_trace(
    space: &SpaceHandle,
    x: &Point,
    lambdas: &[f64],
    results: &[crate::resolvent::ResolventResult],
    reference: Option<&Point>,
) -> Result<IterateTrace, SpaceError> {
    let mut records = Vec::with_capacity(results.len());
    let mut prev = x.clone();
    for (i, (lam, r)) in lambdas.iter().zip(results).enumerate() {
        records.push(TraceRecord {
            k: i + 1,
            point: r.point.clone(),
            step: space.distance(&prev, &r.point)?,
            residual: r.residual,
            dist_to_ref: reference.map(|p| space.distance(&r.point, p)).transpose()?,
            e_applied: 0.0,
            lambda: *lam,
            alpha: None,
        });
        prev = r.point.clone();
    }
    let final_point = records.last().map(|r| r.point.clone()).unwrap_or_else(|| x.clone());
    Ok(IterateTrace {
        initial: x.clone(),
        records,
        status: TerminalStatus::Converged,
        final_point,
        failure: None,
    })
}

/// Plain equilibrium residual min_y f(x, y) of a point over sampled y in K
/// (the subproblem residual with zero regularization).
pub fn ep_residual(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    x: &Point,
    samples: usize,
    seed: u64,
) -> Result<f64, SpaceError> {
    Ok(residual(f, space, set, x, x, 0.0, samples, seed, &[], ExecMode::default())?.value)
}

/// Quasi-Fejer audit of a finished trace against a known solution:
/// d(x_k, x*) <= d(x_{k-1}, x*) + e_k must hold at every index (up to
/// slack), and steps must vanish (last-quartile mean below first-quartile
/// mean).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FejerReport {
    pub ok: bool,
    /// Indices k where the inequality failed.
    pub violations: Vec<usize>,
    pub max_excess: f64,
    pub steps_vanishing: bool,
    pub first_quartile_mean_step: f64,
    pub last_quartile_mean_step: f64,
}

pub fn fejer_report(
    space: &SpaceHandle,
    trace: &IterateTrace,
    solution: &Point,
    slack: f64,
) -> Result<FejerReport, SpaceError> {
    let mut prev = space.distance(&trace.initial, solution)?;
    let mut violations = Vec::new();
    let mut max_excess = f64::NEG_INFINITY;
    for r in &trace.records {
        let cur = space.distance(&r.point, solution)?;
        let excess = cur - prev - r.e_applied;
        if excess > slack {
            violations.push(r.k);
        }
        max_excess = max_excess.max(excess);
        prev = cur;
    }
    let steps: Vec<f64> = trace.records.iter().map(|r| r.step).collect();
    let q = (steps.len() / 4).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (first, last) = if steps.len() >= 2 {
        (mean(&steps[..q]), mean(&steps[steps.len() - q..]))
    } else {
        (0.0, 0.0)
    };
    Ok(FejerReport {
        ok: violations.is_empty(),
        violations,
        max_excess,
        steps_vanishing: last <= first,
        first_quartile_mean_step: first,
        last_quartile_mean_step: last,
    })
}

/// Sufficient conditions under which the proximal iterates converge
/// strongly, not just in the Delta sense. The declared mode documents which
/// hypothesis the instance satisfies; the algorithm itself is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrongMode {
    StrongPseudo,
    StrongConvexY,
    StrongConcaveX,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrongModeReport {
    pub mode: StrongMode,
    pub status: TerminalStatus,
    pub final_distance: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Runs the proximal iteration on an instance declared to satisfy `mode`
/// and checks that the final iterate lands within `threshold` of the known
/// solution.
pub fn strong_mode_check(
    f: &Bifunction,
    space: &SpaceHandle,
    set: &ConvexSet,
    config: &SolveConfig,
    mode: StrongMode,
    solution: &Point,
    threshold: f64,
) -> Result<StrongModeReport, SolveError> {
    let trace = run_ppa(f, space, set, config, Some(solution))?;
    let final_distance = space.distance(&trace.final_point, solution)?;
    Ok(StrongModeReport {
        mode,
        status: trace.status,
        final_distance,
        threshold,
        ok: final_distance <= threshold,
    })
}
