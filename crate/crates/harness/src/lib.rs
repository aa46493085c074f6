//! Experiment orchestration on top of the `monodag` library: rejection-rate
//! sweeps with Wilson intervals, the regime comparison table, and bundle
//! verification for generated instance files.

pub mod experiment;
pub mod regimes;
pub mod verify;

pub use experiment::{run_experiment, ExperimentReport, ExperimentSpec, InstanceSource};
pub use regimes::{regime_table, regimes_csv, RegimePoint};
pub use verify::{verify_bundle, BundleReport};
