//! Monte-Carlo runs: drop users, schedule rounds, precode each round and
//! evaluate throughput.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::baseline::{conventional_sinr, neighbor_pairs, validate_coloring};
use super::config::{Algorithm, InfeasiblePolicy, PatternSource, RunConfig, SchedulerKind};
use super::io::read_pattern_csv;
use crate::channel::{
    compose_channel, db_to_linear, drop_users, hex_grid_colors, link_budget_matrix, phase_matrix, synth_beam_gains,
    BeamPattern, ChannelMatrix, GaussianPattern, MeasuredGains, UserGeometry,
};
use crate::modcod::{average_user_throughput, group_min_sinr, ModcodTable, ThroughputParams};
use crate::partition::GroupPartition;
use crate::precoding::{
    max_min_fair, max_sum_rate, max_sum_rate_available, max_throughput_modcod, pac_ratio, sinr, Frame,
    IterationLog, PrecodingMatrix, SolverConfig,
};
use crate::scheduler::{multicast_aware_rounds, random_beam_rounds};
use crate::{CMat, Error, Result};

/// Independent random streams drawn from one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Geometry = 1,
    Phases = 2,
    Schedule = 3,
    Solver = 4,
}

/// Seed for `stream` at `(drop, round)`, taken from a ChaCha8 keystream so
/// that nearby indices give unrelated seeds.
pub fn stream_seed(seed: u64, stream: Stream, drop: usize, round: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng.set_word_pos((((drop as u128) << 32) | round as u128) * 2);
    rng.next_u64()
}

/// Pattern, MODCOD table and beam colors shared by every drop.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub pattern: BeamPattern,
    pub table: ModcodTable,
    pub colors: Option<Vec<usize>>,
}

impl Scenario {
    /// Loads the files a config refers to.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let (pattern, default_colors, neighbors) = match &cfg.pattern {
            PatternSource::HexGrid {
                rows,
                cols,
                boresight_gain_dbi,
                beamwidth_deg,
                nadir_offset_deg,
            } => {
                let mut p = GaussianPattern::hex_grid(*rows, *cols, *boresight_gain_dbi, *beamwidth_deg);
                p.nadir_offset_deg = *nadir_offset_deg;
                let pairs = neighbor_pairs(&p.centers);
                (BeamPattern::Gaussian(p), Some(hex_grid_colors(*rows, *cols)), pairs)
            }
            PatternSource::File { path, slant_range_m } => {
                let gains_dbi = read_pattern_csv(&std::fs::read_to_string(path)?)?;
                let m = MeasuredGains {
                    gains_dbi,
                    slant_range_m: *slant_range_m,
                };
                (BeamPattern::Measured(m), None, Vec::new())
            }
        };
        let colors = cfg.colors.clone().or(default_colors);
        if let Some(c) = &colors {
            validate_coloring(c, pattern.n_beams(), &neighbors)?;
        }
        let table = match &cfg.modcod_file {
            Some(p) => ModcodTable::from_csv(&std::fs::read_to_string(p)?)?,
            None => ModcodTable::dvb_s2x(),
        };
        Ok(Self { pattern, table, colors })
    }

    pub fn n_beams(&self) -> usize {
        self.pattern.n_beams()
    }
}

/// One Monte-Carlo realization of user positions and channel phases.
#[derive(Debug, Clone)]
pub struct DropData {
    pub geometry: UserGeometry,
    pub channel: ChannelMatrix,
    pub beam_users: Vec<Vec<usize>>,
}

pub fn generate_drop(cfg: &RunConfig, scenario: &Scenario, drop: usize) -> Result<DropData> {
    let seed = cfg.require_seed()?;
    let geometry = drop_users(&scenario.pattern, cfg.users_per_beam, stream_seed(seed, Stream::Geometry, drop, 0))?;
    let gains = synth_beam_gains(&geometry, &scenario.pattern)?;
    let b = link_budget_matrix(&gains, &cfg.link, &geometry)?;
    let phases = phase_matrix(geometry.len(), stream_seed(seed, Stream::Phases, drop, 0))?;
    let channel = compose_channel(&phases, &b)?;
    let beam_users = (0..scenario.n_beams()).map(|k| geometry.users_of_beam(k)).collect();
    Ok(DropData {
        geometry,
        channel,
        beam_users,
    })
}

/// Transmission rounds for one drop. The conventional baseline always
/// serves each beam's own users, so it uses per-beam random groups.
pub fn schedule_drop(cfg: &RunConfig, data: &DropData, drop: usize) -> Result<Vec<GroupPartition>> {
    let seed = stream_seed(cfg.require_seed()?, Stream::Schedule, drop, 0);
    match (cfg.scheduler, cfg.algorithm) {
        (SchedulerKind::MulticastAware, a) if a != Algorithm::Conventional => {
            multicast_aware_rounds(&data.channel.h, data.beam_users.len(), cfg.rho)
        }
        _ => random_beam_rounds(&data.beam_users, cfg.rho, seed),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserOutcome {
    pub group: usize,
    /// Index into the drop's users.
    pub user: usize,
    pub sinr: f64,
    pub rate_gbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub drop: usize,
    pub round: usize,
    pub users: Vec<UserOutcome>,
    pub r_avg_gbps: f64,
    pub precoder: PrecodingMatrix,
    pub trace: Vec<IterationLog>,
}

/// Runs one precoding algorithm on a frame. The conventional baseline is
/// not a precoder and is rejected here.
pub fn precode_frame(
    algorithm: Algorithm,
    frame: &Frame,
    table: &ModcodTable,
    gamma_min: f64,
    solver: &SolverConfig,
    maxmin_rel_tol: f64,
) -> Result<(PrecodingMatrix, Vec<IterationLog>)> {
    match algorithm {
        Algorithm::MaxMinRef => {
            let o = max_min_fair(frame, solver, maxmin_rel_tol)?;
            let log = IterationLog {
                iteration: o.bisections,
                objective: o.gamma,
                r_star: pac_ratio(&o.w, &frame.p_ant),
                accepted: true,
            };
            Ok((o.w, vec![log]))
        }
        Algorithm::SumRate => max_sum_rate(frame, solver).map(|o| (o.w, o.trace)),
        Algorithm::SumRateAvailable => max_sum_rate_available(frame, gamma_min, solver).map(|o| (o.w, o.trace)),
        Algorithm::SumRateModcod => max_throughput_modcod(frame, table, gamma_min, solver).map(|o| (o.w, o.trace)),
        Algorithm::Conventional => Err(Error::Config("the conventional baseline has no precoder".into())),
    }
}

/// Channel rows of `partition`'s users, grouped consecutively, and the
/// matching local partition.
fn local_frame(h: &CMat, partition: &GroupPartition) -> Result<(CMat, GroupPartition, Vec<usize>)> {
    partition.check_rows(h.nrows())?;
    let users: Vec<usize> = partition.groups().concat();
    let mut next = 0;
    let local = partition
        .groups()
        .iter()
        .map(|g| {
            let ids: Vec<usize> = (next..next + g.len()).collect();
            next += g.len();
            ids
        })
        .collect();
    Ok((h.select_rows(&users), GroupPartition::new(local)?, users))
}

/// Precodes and evaluates one round at total power `total_power_w`.
/// `Ok(None)` is a skipped infeasible round.
pub fn evaluate_round(
    cfg: &RunConfig,
    scenario: &Scenario,
    data: &DropData,
    partition: &GroupPartition,
    total_power_w: f64,
    drop: usize,
    round: usize,
) -> Result<Option<RoundOutcome>> {
    let wrap = |e: Error| Error::Round {
        drop,
        round,
        source: Box::new(e),
    };
    let (h, local, users) = local_frame(&data.channel.h, partition).map_err(wrap)?;
    let n_t = h.ncols();
    let link = crate::channel::LinkBudgetParams {
        total_power: total_power_w,
        ..cfg.link.clone()
    };
    let p_ant = link.per_antenna_limits(n_t);
    let mut params = ThroughputParams {
        user_bandwidth: link.user_bandwidth,
        rolloff: link.rolloff,
    };
    let (w, sinrs, trace) = if cfg.algorithm == Algorithm::Conventional {
        let colors = scenario
            .colors
            .as_ref()
            .ok_or_else(|| wrap(Error::Coloring("the baseline needs beam colors".into())))?;
        let s = conventional_sinr(&h, colors, &local, &p_ant, &vec![1.0; h.nrows()]).map_err(wrap)?;
        params.user_bandwidth /= 4.0;
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n_t,
            p_ant.iter().map(|p| Complex64::new(p.sqrt(), 0.0)),
        ));
        (PrecodingMatrix::new(w), s, Vec::new())
    } else {
        let frame = Frame::new(h, local.clone(), p_ant.clone()).map_err(wrap)?;
        let solver = SolverConfig {
            rng_seed: stream_seed(cfg.require_seed()?, Stream::Solver, drop, round),
            ..cfg.solver.clone()
        };
        let gamma_min = db_to_linear(cfg.gamma_min_db);
        match precode_frame(cfg.algorithm, &frame, &scenario.table, gamma_min, &solver, cfg.maxmin_rel_tol) {
            Ok((w, trace)) => {
                let s = sinr(&w, &frame);
                (w, s, trace)
            }
            Err(Error::Infeasible | Error::RandomizationFailed { .. })
                if cfg.on_infeasible == InfeasiblePolicy::Skip =>
            {
                return Ok(None)
            }
            Err(e) => return Err(wrap(e)),
        }
    };
    let ratio = pac_ratio(&w, &p_ant);
    if !(ratio <= 1.0 + 1e-6) {
        return Err(wrap(Error::PowerViolation(ratio)));
    }
    let mins = group_min_sinr(&sinrs, &local);
    let out_users = local
        .groups()
        .iter()
        .enumerate()
        .flat_map(|(k, g)| {
            let rate = params.prefactor_gbaud() * scenario.table.efficiency(mins[k]);
            let users = &users;
            let sinrs = &sinrs;
            g.iter().map(move |&i| UserOutcome {
                group: k,
                user: users[i],
                sinr: sinrs[i],
                rate_gbps: rate,
            })
        })
        .collect();
    Ok(Some(RoundOutcome {
        drop,
        round,
        users: out_users,
        r_avg_gbps: average_user_throughput(&sinrs, &local, &scenario.table, &params),
        precoder: w,
        trace,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub total_power_w: f64,
    pub rounds: Vec<RoundOutcome>,
    /// `(drop, round)` of skipped infeasible rounds.
    pub skipped: Vec<(usize, usize)>,
    /// Mean of the per-round values, Gbps per beam.
    pub r_avg_gbps: f64,
    /// Share of served users below the lowest MODCOD threshold.
    pub outage_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub algorithm: Algorithm,
    pub scheduler: SchedulerKind,
    pub rho: usize,
    pub drops: usize,
    pub points: Vec<PointReport>,
    pub wall_clock: Duration,
}

impl ExperimentReport {
    pub fn users(&self, point: usize) -> impl Iterator<Item = (&RoundOutcome, &UserOutcome)> {
        self.points[point]
            .rounds
            .iter()
            .flat_map(|r| r.users.iter().map(move |u| (r, u)))
    }
}

/// Runs every power point of `cfg` over all drops and rounds. Work is spread
/// over the current rayon pool; results are merged in index order, so the
/// report does not depend on the thread count.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.validate()?;
    cfg.require_seed()?;
    let scenario = Scenario::from_config(cfg)?;
    if cfg.algorithm == Algorithm::Conventional && scenario.colors.is_none() {
        return Err(Error::Coloring("the baseline needs beam colors".into()));
    }
    let drops: Vec<(DropData, Vec<GroupPartition>)> = (0..cfg.drops)
        .into_par_iter()
        .map(|d| {
            let data = generate_drop(cfg, &scenario, d)?;
            let rounds = schedule_drop(cfg, &data, d)?;
            Ok((data, rounds))
        })
        .collect::<Result<_>>()?;

    let items: Vec<(usize, usize, usize)> = (0..cfg.power_sweep_w.len())
        .flat_map(|p| {
            drops
                .iter()
                .enumerate()
                .flat_map(move |(d, (_, rounds))| (0..rounds.len()).map(move |r| (p, d, r)))
        })
        .collect();
    let results: Vec<Result<Option<RoundOutcome>>> = items
        .par_iter()
        .map(|&(p, d, r)| {
            let (data, rounds) = &drops[d];
            evaluate_round(cfg, &scenario, data, &rounds[r], cfg.power_sweep_w[p], d, r)
        })
        .collect();

    let lowest = db_to_linear(scenario.table.lowest_threshold_db());
    let mut points: Vec<PointReport> = cfg
        .power_sweep_w
        .iter()
        .map(|&p| PointReport {
            total_power_w: p,
            rounds: Vec::new(),
            skipped: Vec::new(),
            r_avg_gbps: f64::NAN,
            outage_fraction: f64::NAN,
        })
        .collect();
    for (&(p, d, r), res) in items.iter().zip(results) {
        match res? {
            Some(o) => points[p].rounds.push(o),
            None => points[p].skipped.push((d, r)),
        }
    }
    for pt in &mut points {
        if pt.rounds.is_empty() {
            continue;
        }
        pt.r_avg_gbps = pt.rounds.iter().map(|r| r.r_avg_gbps).sum::<f64>() / pt.rounds.len() as f64;
        let (n, out) = pt
            .rounds
            .iter()
            .flat_map(|r| &r.users)
            .fold((0usize, 0usize), |(n, o), u| (n + 1, o + usize::from(u.sinr < lowest)));
        pt.outage_fraction = out as f64 / n as f64;
    }
    Ok(ExperimentReport {
        algorithm: cfg.algorithm,
        scheduler: cfg.scheduler,
        rho: cfg.rho,
        drops: cfg.drops,
        points,
        wall_clock: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_seeds_differ() {
        let a = stream_seed(1, Stream::Solver, 0, 0);
        assert_eq!(a, stream_seed(1, Stream::Solver, 0, 0));
        assert_ne!(a, stream_seed(1, Stream::Solver, 0, 1));
        assert_ne!(a, stream_seed(1, Stream::Solver, 1, 0));
        assert_ne!(a, stream_seed(1, Stream::Phases, 0, 0));
        assert_ne!(a, stream_seed(2, Stream::Solver, 0, 0));
    }

    #[test]
    fn local_frame_regroups_rows() {
        let h = CMat::from_fn(5, 2, |i, j| Complex64::new(i as f64, j as f64));
        let p = GroupPartition::new(vec![vec![4, 1], vec![0, 3]]).unwrap();
        let (hl, local, users) = local_frame(&h, &p).unwrap();
        assert_eq!(users, vec![4, 1, 0, 3]);
        assert_eq!(local, GroupPartition::consecutive(2, 2));
        assert_eq!(hl[(0, 0)].re, 4.0);
    }
}
