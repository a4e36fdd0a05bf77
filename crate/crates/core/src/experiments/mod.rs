//! Experiment drivers: data specifications, lifespan measurements, local energy sweeps
//! and run manifests.

mod data;
mod kss;
mod lifespan;
mod record;

pub use data::{parse_nonlinearity, DataShape, DataSlot, DataSpec};
pub use kss::{
    kss_constant_sweep, kss_data_family, CoefficientSpec, ForcingSpec, KssConfig, KssRow, KssSkip, KssSummary, KssTable,
};
pub use lifespan::{
    fit_law, lifespan_sweep, lifespan_sweep_fit, measure_lifespan, FitVariable, LadderRung, LawFit, LawKind,
    LifespanConfig, LifespanFit, LifespanMeasurement, RungOutcome, MIN_CONFIRMED,
};
pub use record::{run_id, Artifact, Metric, RunRecord, MANIFEST};

/// Environment variable holding the worker count of parallel sweeps.
pub const WORKERS_ENV: &str = "RWL_WORKERS";

/// Worker count from `RWL_WORKERS`, if set to a positive integer.
pub fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}
