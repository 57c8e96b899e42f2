//! Experiment configuration: one JSON document drives every subcommand.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hadamard_ep::bifunctions::BifunctionProperty;
use hadamard_ep::spaces::Distortion;
use hadamard_ep::{Bifunction, ConvexSet, Point, SolveConfig, SpaceHandle, SpaceKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Ppa,
    Halpern,
    ResolventPath,
}

/// Named bifunction constructions the CLI can instantiate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case")]
pub enum BifunctionSpec {
    /// f == 0; its regularized subproblem is the projection onto K.
    Zero,
    /// phi = d^2(., anchor)/2.
    HalfSqDist { anchor: Point },
    /// phi = sum w_i d^2(., a_i)/2 (unit weights when omitted).
    FrechetMean { anchors: Vec<Point>, weights: Option<Vec<f64>> },
    /// phi = d^2(., S) for the segment S = [a, b].
    SqDistToSegment { a: Point, b: Point },
    /// f(x,y) = <(Tx -> x), (x -> y)> for a named map T.
    Vi { map: MapSpec, theta: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    Constant { point: Point },
    /// Metric projection onto a convex set (nonexpansive).
    Project { set: ConvexSet },
    /// x -> factor * x; flat space only. Expansive when |factor| > 1.
    Scale { factor: f64 },
}

impl BifunctionSpec {
    pub fn build(&self, space: SpaceHandle) -> Result<Bifunction> {
        Ok(match self {
            BifunctionSpec::Zero => Bifunction::zero(space),
            BifunctionSpec::HalfSqDist { anchor } => {
                space.validate_point(anchor)?;
                Bifunction::half_sq_dist(space, anchor.clone())
            }
            BifunctionSpec::FrechetMean { anchors, weights } => {
                if anchors.is_empty() {
                    bail!("frechet_mean needs at least one anchor");
                }
                for a in anchors {
                    space.validate_point(a)?;
                }
                let w = weights.clone().unwrap_or_else(|| vec![1.0; anchors.len()]);
                if w.len() != anchors.len() {
                    bail!("frechet_mean needs one weight per anchor");
                }
                Bifunction::frechet_mean(space, anchors.clone(), w)
            }
            BifunctionSpec::SqDistToSegment { a, b } => {
                space.validate_point(a)?;
                space.validate_point(b)?;
                Bifunction::sq_dist_to_segment(space, a.clone(), b.clone())
            }
            BifunctionSpec::Vi { map, theta } => {
                let f = match map {
                    MapSpec::Identity => Bifunction::from_map(space, |x: &Point| x.clone()),
                    MapSpec::Constant { point } => {
                        space.validate_point(point)?;
                        let p = point.clone();
                        Bifunction::from_map(space, move |_: &Point| p.clone())
                    }
                    MapSpec::Project { set } => {
                        space.validate_set(set)?;
                        let set = set.clone();
                        Bifunction::from_map(space, move |x: &Point| {
                            space.project(&set, x).expect("validated set")
                        })
                    }
                    MapSpec::Scale { factor } => {
                        if !matches!(space.kind(), SpaceKind::Euclidean { .. }) {
                            bail!("scale maps are only defined on flat space");
                        }
                        let s = *factor;
                        Bifunction::from_map(space, move |x: &Point| {
                            let Point::Euclidean { coords } = x else { unreachable!() };
                            Point::euclidean(coords.iter().map(|c| s * c).collect())
                        })
                    }
                };
                // An expansive scale is (factor - 1)-undermonotone; declare
                // it unless the config overrides.
                let default_theta = match map {
                    MapSpec::Scale { factor } => Some((factor - 1.0).max(0.0)),
                    _ => Some(0.0),
                };
                match theta.or(default_theta) {
                    Some(t) => f.with_theta(t),
                    None => f,
                }
            }
        })
    }
}

/// Sweep / property-check settings shared by the two check subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Pass/fail threshold on worst violations. Defaults to 1e-9 for space
    /// sweeps and 1e-8 for bifunction checks.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Self-test hook: scales one distance inside the comparison checks.
    #[serde(default)]
    pub distortion: Option<Distortion>,
    /// Properties to check; empty means vanishing diagonal + monotone.
    #[serde(default)]
    pub properties: Vec<BifunctionProperty>,
}

fn default_samples() -> usize {
    10_000
}

fn default_radius() -> f64 {
    2.0
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec {
            samples: default_samples(),
            seed: 0,
            radius: default_radius(),
            tolerance: None,
            distortion: None,
            properties: Vec::new(),
        }
    }
}

/// The single configuration document. Subcommands read the sections they
/// need; CLI flags override the scalar fields (seed, output directory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub space: SpaceKind,
    #[serde(default = "default_set")]
    pub set: ConvexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bifunction: Option<BifunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<AlgorithmKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveConfig>,
    /// Strictly decreasing positive sequence for the resolvent-path
    /// algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Optional known reference point; recorded as dist_to_ref in traces,
    /// never used by the algorithms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let space = SpaceHandle::from_kind(config.space);
        space.validate_set(&config.set)?;
        if let Some(r) = &config.reference {
            space.validate_point(r)?;
        }
        Ok(config)
    }

    pub fn space_handle(&self) -> SpaceHandle {
        SpaceHandle::from_kind(self.space)
    }
}

fn default_set() -> ConvexSet {
    ConvexSet::WholeSpace
}
