//! Per-iteration solver traces and their CSV rendering.

use serde::{Deserialize, Serialize};

use crate::spaces::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    Converged,
    MaxIter,
    SubproblemFailed,
}

/// One outer-iteration record. `step` is d(x_{k-1}, x_k); `residual` is the
/// sampled subproblem residual of the solve that produced x_k;
/// `dist_to_ref` is diagnostic instrumentation against a caller-supplied
/// reference point and never feeds back into the algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub point: Point,
    pub step: f64,
    pub residual: f64,
    pub dist_to_ref: Option<f64>,
    pub e_applied: f64,
    pub lambda: f64,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub initial: Point,
    pub records: Vec<TraceRecord>,
    pub status: TerminalStatus,
    pub final_point: Point,
    /// Error message when `status` is `SubproblemFailed`.
    pub failure: Option<String>,
}

impl IterateTrace {
    /// CSV with the fixed header `k,step,residual,dist_to_ref,lambda_k,alpha_k,e_k`;
    /// reals are rendered with 17 significant digits, optional fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,step,residual,dist_to_ref,lambda_k,alpha_k,e_k\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k,
                g17(r.step),
                g17(r.residual),
                r.dist_to_ref.map(g17).unwrap_or_default(),
                g17(r.lambda),
                r.alpha.map(g17).unwrap_or_default(),
                g17(r.e_applied),
            ));
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn g17(v: f64) -> String {
    format!("{v:.16e}")
}
