//! Seeded Monte Carlo runner: channel, cooperation scheme, precoder, impairments, metrics.

pub mod config;
pub mod experiment;
pub mod io;
pub mod rng;
pub mod verify;

pub use config::{ExperimentConfig, Preset};
pub use experiment::{
    all_interferer_counts, run, run_drop, summarize, sweep_interferers, sweep_power, DropChannel, DropResult,
    Experiment, RunOutput, RunSummary, SweepPoint, UserResult,
};
