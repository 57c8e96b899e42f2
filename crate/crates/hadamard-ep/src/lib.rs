//! Equilibrium problems EP(f, K) on concrete Hadamard spaces.
//!
//! A Hadamard space is a complete CAT(0) geodesic metric space. This crate
//! provides three concrete models (flat Euclidean space, the hyperboloid
//! model of hyperbolic space, and a metric star tree), bifunctions with
//! finite-sample monotonicity checkers, resolvent operators for the
//! regularized subproblem, and the two outer loops built on them: an
//! inexact proximal-point iteration and its Halpern regularization.
//!
//! Sample sweeps (geometry axioms, monotonicity checks, residual probes)
//! run data-parallel via rayon when the `parallel` feature is enabled
//! (default) and fall back to sequential iteration without it. Both paths
//! produce identical reports: samples are drawn sequentially from a seeded
//! generator and reduced with order-independent min/max.

// Negated float comparisons like `!(x > 0.0)` are deliberate: they treat
// NaN as invalid instead of silently accepting it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifunctions;
pub mod exec;
pub mod resolvent;
pub mod sampling;
pub mod solvers;
pub mod spaces;

pub use bifunctions::{Bifunction, BifunctionProperty, CheckConfig, PropertyReport};
pub use exec::ExecMode;
pub use resolvent::{ResolventError, ResolventRequest, ResolventResult, Strategy};
pub use solvers::{IterateTrace, Schedule, SolveConfig, TerminalStatus};
pub use spaces::{ConvexSet, GeodesicParam, Point, SpaceError, SpaceHandle, SpaceKind, Tangent};
