//! Experiment harness around the `auxrl` crate: resolved run configs,
//! seeded training runs with CSV output, hyperparameter sweeps, SVG learning
//! curves, oracle dumps and the Lobster value-geometry export. The `auxrl`
//! binary in this package is a thin CLI over these modules.

pub mod builders;
pub mod config;
pub mod experiment;
pub mod geometry;
pub mod plot;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Layout(#[from] auxrl::envs::layout::LayoutError),
    #[error(transparent)]
    Filter(#[from] auxrl::filter::FilterError),
    #[error(transparent)]
    Learn(#[from] auxrl::learn::LearnError),
    #[error(transparent)]
    Oracle(#[from] auxrl::oracle::mdp::OracleError),
    #[error("checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed csv {path}: {message}")]
    Csv { path: String, message: String },
    #[error("internal: {0}")]
    Internal(String),
}

/// Build the global rayon pool honoring `AUX_THREADS`. Callable more than
/// once; later calls are no-ops (the first pool wins).
pub fn init_thread_pool() {
    let threads = std::env::var("AUX_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
