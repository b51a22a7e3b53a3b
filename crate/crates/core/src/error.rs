use satprecode_conic::ConicError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("beam pattern has no beams")]
    EmptyPattern,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not enough users: need {needed}, have {available}")]
    InsufficientUsers { needed: usize, available: usize },
    #[error("empty input")]
    Empty,
    #[error("invalid MODCOD table: {0}")]
    Table(String),
    #[error("already at the top MODCOD tier")]
    TopTier,
    #[error("QoS targets cannot be met under the power constraints")]
    Infeasible,
    #[error("no randomized candidate met the targets (relaxation bound {sdr_lower_bound})")]
    RandomizationFailed { sdr_lower_bound: f64 },
    #[error("per-antenna power exceeded: ratio {0}")]
    PowerViolation(f64),
    #[error("invalid coloring: {0}")]
    Coloring(String),
    #[error("solver: {0}")]
    Solver(#[from] ConicError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Config(String),
    #[error("drop {drop}, round {round}: {source}")]
    Round {
        drop: usize,
        round: usize,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
