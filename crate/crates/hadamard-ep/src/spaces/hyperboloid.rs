//! Minkowski-model numerics for the hyperboloid.
//!
//! Points live on the upper sheet {x : m(x,x) = -1, x0 > 0} of the unit
//! hyperboloid, where m is the Minkowski bilinear form. Every operation
//! renormalizes its output back onto the sheet, and arccosh near 1 goes
//! through a series to avoid the cancellation in ln(u + sqrt(u^2 - 1)).

use super::{Point, SpaceError};

/// Minkowski bilinear form -a0*b0 + sum_i ai*bi.
pub(super) fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// arccosh(1 + e) with a series branch for e <= 1e-8. Callers must supply
/// e = u - 1 computed without cancellation.
pub(super) fn acosh_one_plus(e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    if e <= 1e-8 {
        // arccosh(1+e) = sqrt(2e) * (1 - e/12 + O(e^2))
        (2.0 * e).sqrt() * (1.0 - e / 12.0)
    } else {
        (1.0 + e + (e * (2.0 + e)).sqrt()).ln()
    }
}

/// u - 1 for u = -m(a, b), via the identity m(a-b, a-b) = -2 - 2 m(a,b):
/// the difference form avoids the catastrophic cancellation of
/// -m(a,b) - 1 when a and b are close.
fn cosh_distance_minus_one(a: &[f64], b: &[f64]) -> f64 {
    let mut s = (a[0] - b[0]) * (b[0] - a[0]); // -(a0-b0)^2
    for i in 1..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    0.5 * s
}

fn renormalize(coords: &mut [f64]) {
    let scale = (-minkowski(coords, coords)).sqrt();
    for c in coords.iter_mut() {
        *c /= scale;
    }
    if coords[0] < 0.0 {
        for c in coords.iter_mut() {
            *c = -*c;
        }
    }
}

pub(super) fn validate(coords: &[f64], tol: f64) -> Result<(), SpaceError> {
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(SpaceError::InvalidPoint("non-finite coordinate".into()));
    }
    if coords[0] <= 0.0 {
        return Err(SpaceError::InvalidPoint("hyperboloid points need x0 > 0".into()));
    }
    let defect = (minkowski(coords, coords) + 1.0).abs();
    if defect > tol {
        return Err(SpaceError::InvalidPoint(format!(
            "off the hyperboloid sheet: |m(x,x)+1| = {defect:.3e}"
        )));
    }
    Ok(())
}

pub(super) fn make_point(mut coords: Vec<f64>, tol: f64) -> Result<Point, SpaceError> {
    if coords.len() < 2 {
        return Err(SpaceError::InvalidPoint("hyperboloid points need >= 2 coordinates".into()));
    }
    validate(&coords, tol)?;
    renormalize(&mut coords);
    Ok(Point::Hyperboloid { coords })
}

pub(super) fn distance(a: &[f64], b: &[f64]) -> f64 {
    acosh_one_plus(cosh_distance_minus_one(a, b))
}

/// Geodesic interpolation gamma(t) = (sinh((1-t)d) a + sinh(td) b) / sinh(d).
pub(super) fn geodesic(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    let d = distance(a, b);
    let (wa, wb) = if d < 1e-8 {
        // First-order limit; the renormalization absorbs the O(d^2) error.
        (1.0 - t, t)
    } else {
        let s = d.sinh();
        (((1.0 - t) * d).sinh() / s, (t * d).sinh() / s)
    };
    let mut out: Vec<f64> = a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect();
    renormalize(&mut out);
    out
}

/// Component of `v` tangent to the sheet at `base`.
fn project_tangent(base: &[f64], v: &[f64]) -> Vec<f64> {
    let mb = minkowski(base, v);
    v.iter().zip(base).map(|(vi, bi)| vi + mb * bi).collect()
}

pub(super) fn tangent_norm(base: &[f64], v: &[f64]) -> f64 {
    let t = project_tangent(base, v);
    minkowski(&t, &t).max(0.0).sqrt()
}

pub(super) fn exp(base: &[f64], v: &[f64]) -> Vec<f64> {
    let t = project_tangent(base, v);
    let n = minkowski(&t, &t).max(0.0).sqrt();
    if n < 1e-300 {
        return base.to_vec();
    }
    let (c, s) = (n.cosh(), n.sinh() / n);
    let mut out: Vec<f64> = base.iter().zip(&t).map(|(b, ti)| c * b + s * ti).collect();
    renormalize(&mut out);
    out
}

pub(super) fn log(base: &[f64], target: &[f64]) -> Vec<f64> {
    let e = cosh_distance_minus_one(base, target);
    let kappa = 1.0 + e; // cosh of the distance
    let w: Vec<f64> = target.iter().zip(base).map(|(t, b)| t - kappa * b).collect();
    let d = acosh_one_plus(e);
    let s = d.sinh();
    if s < 1e-300 {
        return w; // w itself is O(d); the ratio d/sinh(d) -> 1
    }
    w.iter().map(|wi| wi * d / s).collect()
}
