//! Monte-Carlo system simulator, four-color baseline and plot-data output.

pub mod baseline;
pub mod cdf;
pub mod config;
pub mod experiment;
pub mod io;
pub mod output;

pub use baseline::{conventional_sinr, neighbor_pairs, validate_coloring};
pub use cdf::empirical_cdf;
pub use config::{Algorithm, InfeasiblePolicy, PatternSource, RunConfig, SchedulerKind};
pub use experiment::{
    evaluate_round, generate_drop, precode_frame, run_experiment, schedule_drop, stream_seed, DropData,
    ExperimentReport, PointReport, RoundOutcome, Scenario, Stream, UserOutcome,
};
pub use output::write_outputs;
