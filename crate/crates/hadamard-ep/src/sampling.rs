//! Seeded point samplers for spaces and convex sets.
//!
//! Sampling is always sequential so that a seed pins the whole draw; sweeps
//! parallelize the evaluation of already-drawn samples, never the drawing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spaces::{ConvexSet, GeodesicParam, Point, SpaceError, SpaceHandle, SpaceKind, Tangent};

/// Draws points from a convex set of a space.
///
/// Ambient sets (whole space) sample a ball of radius `radius` around the
/// basepoint; balls, segments and subtrees are sampled parametrically so
/// low-dimensional sets get exact members rather than rejection misses.
pub struct SetSampler<'a> {
    space: &'a SpaceHandle,
    set: &'a ConvexSet,
    radius: f64,
    rng: ChaCha8Rng,
}

impl<'a> SetSampler<'a> {
    pub fn new(
        space: &'a SpaceHandle,
        set: &'a ConvexSet,
        radius: f64,
        seed: u64,
    ) -> Result<Self, SpaceError> {
        space.validate_set(set)?;
        Ok(SetSampler { space, set, radius, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn sample(&mut self) -> Point {
        match self.set {
            ConvexSet::WholeSpace => {
                let base = self.space.basepoint();
                sample_ball(self.space, &mut self.rng, &base, self.radius)
            }
            ConvexSet::Ball { center, radius } => {
                sample_ball(self.space, &mut self.rng, center, *radius)
            }
            ConvexSet::Segment { a, b } => {
                let t = GeodesicParam::new(self.rng.gen::<f64>());
                self.space.geodesic_point(a, b, t).expect("segment endpoints validated")
            }
            ConvexSet::Subtree { rays, cap } => {
                let ray = rays[self.rng.gen_range(0..rays.len())];
                let hi = cap.unwrap_or(self.radius).min(self.radius.max(1e-6));
                Point::star_tree(ray, self.rng.gen::<f64>() * hi)
            }
        }
    }
}

/// Approximately uniform draw from the closed metric ball B(center, radius).
pub fn sample_ball(
    space: &SpaceHandle,
    rng: &mut ChaCha8Rng,
    center: &Point,
    radius: f64,
) -> Point {
    match space.kind() {
        SpaceKind::Euclidean { dim } => {
            let v = random_direction(rng, dim);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            let Point::Euclidean { coords } = center else { unreachable!() };
            Point::euclidean(coords.iter().zip(&v).map(|(c, d)| c + r * d).collect())
        }
        SpaceKind::Hyperboloid { dim } => {
            // Direction in the tangent space at the center, then exponential.
            let ambient = random_direction(rng, dim + 1);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            let v = Tangent(ambient);
            let n = space.tangent_norm(center, &v).expect("manifold kind");
            if n < 1e-12 {
                return center.clone();
            }
            space.exp_map(center, &v.scale(r / n)).expect("manifold kind")
        }
        SpaceKind::StarTree { rays } => {
            // Uniform ray, uniform radius along the geodesic from the center.
            let Point::StarTree { ray: cr, radius: crad } = center else { unreachable!() };
            let ray = rng.gen_range(0..rays);
            let r = radius * rng.gen::<f64>();
            if ray == *cr {
                Point::star_tree(ray, (crad + r * if rng.gen::<bool>() { 1.0 } else { -1.0 }).max(0.0))
            } else if r <= *crad {
                Point::star_tree(*cr, crad - r)
            } else {
                Point::star_tree(ray, r - crad)
            }
        }
    }
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Seeded RNG shared by solver perturbations and residual probes.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
