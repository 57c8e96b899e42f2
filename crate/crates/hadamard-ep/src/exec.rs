//! Sequential/parallel dispatch for sample sweeps.

use serde::{Deserialize, Serialize};

/// How a sweep evaluates its sample batch.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and quietly
/// degrades to sequential iteration otherwise, so callers can keep one code
/// path. Both modes yield identical results: inputs are generated before the
/// sweep and reductions are exact min/max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match mode {
            ExecMode::Parallel => items.par_iter().map(f).collect(),
            ExecMode::Sequential => items.iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = mode;
        items.iter().map(f).collect()
    }
}
