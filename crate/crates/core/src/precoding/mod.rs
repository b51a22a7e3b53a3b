//! Frame-based multigroup multicast precoder design.

pub mod maxmin;
pub mod modcod_opt;
pub mod projection;
pub mod qos;
pub mod sinr;
pub mod subgradient;
pub mod sum_rate;
pub mod types;

pub use maxmin::{max_min_fair, MaxMinOutput};
pub use modcod_opt::{discrete_objective, max_throughput_modcod, refine_modcod, ModcodOutput};
pub use projection::{project_pac, project_pac_availability};
pub use qos::{load_ratio, min_powers, min_powers_lp, sdr_relaxation, solve_qos, solve_qos_with, SdrSolution};
pub use sinr::{gains, pac_ratio, per_antenna_power, sinr, sinr_from_gains, sum_rate};
pub use subgradient::{subgradient_step, utility};
pub use sum_rate::{max_sum_rate, max_sum_rate_available, uniform_start, SumRateOutput};
pub use types::{Frame, IterationLog, PrecodingMatrix, QosResult, SolverConfig};
