//! Experiment runner: simulations, exact exports and verification sweeps.

mod commands;
mod input;
mod io;
mod simulate;
mod verify;

pub use commands::{
    binary_spec_of, cmd_exact, cmd_mixing, cmd_outlier, exact_distribution, mixing_report,
    outlier_report, ExactMethod, ExactResult, MixingReport, OutlierReport,
};
pub use input::{InputSpec, MAX_GENERATED_LEN};
pub use simulate::{
    cmd_simulate, replica_rng, run_simulation, write_simulation, ExperimentConfig,
    SimulationResult, StationaryEstimate, TrajectoryRow, TrajectoryStats, DEFAULT_BURN_IN,
    DEFAULT_REPLICAS, DEFAULT_STEPS,
};
pub use verify::{cmd_verify, run_verify, CheckResult, VerifyConfig, VerifyReport};
