//! Throughput maximization over the discrete MODCOD ladder.

use super::qos::solve_qos_with;
use super::sinr::sinr;
use super::sum_rate::{iteration_seed, max_sum_rate_available};
use super::types::{Frame, IterationLog, PrecodingMatrix, SolverConfig};
use crate::channel::db_to_linear;
use crate::modcod::{group_min_sinr, ModcodTable};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModcodOutput {
    pub w: PrecodingMatrix,
    /// `Σ_k f(min SINR_k)`, bps/Hz.
    pub objective: f64,
    /// Step 1 then one entry per tentative raise.
    pub trace: Vec<IterationLog>,
}

/// `Σ_k f(min_{i∈G_k} SINR_i)`.
pub fn discrete_objective(w: &PrecodingMatrix, frame: &Frame, table: &ModcodTable) -> f64 {
    group_min_sinr(&sinr(w, frame), &frame.partition)
        .iter()
        .map(|s| table.efficiency(*s))
        .sum()
}

fn threshold(table: &ModcodTable, tier: usize) -> f64 {
    db_to_linear(table.rows()[tier].threshold_db)
}

/// Per-group targets: the table floor of each group's current worst SINR,
/// never below `gamma_min`.
fn floored_targets(mins: &[f64], table: &ModcodTable, gamma_min: f64, dead: &[bool]) -> Vec<f64> {
    mins.iter()
        .zip(dead)
        .map(|(&m, &d)| {
            if d {
                return 0.0;
            }
            let floor = table.tier(m).map(|t| threshold(table, t)).unwrap_or(0.0);
            floor.max(gamma_min)
        })
        .collect()
}

fn per_user(frame: &Frame, group_targets: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; frame.h.nrows()];
    for (k, g) in frame.partition.groups().iter().enumerate() {
        for &i in g {
            t[i] = group_targets[k];
        }
    }
    t
}

/// Solves the QoS problem at `targets` and scales onto the power limits.
/// `None` unless the targets fit in the available power.
fn attempt(
    frame: &Frame,
    group_targets: &[f64],
    cfg: &SolverConfig,
    seed: &PrecodingMatrix,
    step: usize,
) -> Option<(PrecodingMatrix, f64)> {
    let step_cfg = SolverConfig {
        rng_seed: iteration_seed(cfg.rng_seed, 1000 + step),
        ..cfg.clone()
    };
    let q = solve_qos_with(frame, &per_user(frame, group_targets), &step_cfg, &[seed.directions()]).ok()?;
    if q.r_star > 1.0 {
        return None;
    }
    let w = if q.r_star > 0.0 { q.w.scale_powers(1.0 / q.r_star) } else { q.w };
    Some((w, q.r_star))
}

/// Runs [`max_sum_rate_available`] and then [`refine_modcod`].
pub fn max_throughput_modcod(
    frame: &Frame,
    table: &ModcodTable,
    gamma_min: f64,
    cfg: &SolverConfig,
) -> Result<ModcodOutput> {
    check_gamma(table, gamma_min)?;
    let sra = max_sum_rate_available(frame, gamma_min, cfg)?;
    refine_modcod(frame, table, gamma_min, cfg, &sra.w)
}

fn check_gamma(table: &ModcodTable, gamma_min: f64) -> Result<()> {
    let lowest = db_to_linear(table.lowest_threshold_db());
    if !(gamma_min >= lowest) {
        return Err(Error::Parameter(format!(
            "minimum SINR {gamma_min} is below the lowest MODCOD threshold {lowest}"
        )));
    }
    Ok(())
}

/// Discrete refinement of an availability-feasible precoder `start`.
///
/// Step 1 re-solves with each group's target floored to the table. Step 2
/// probes a one-level raise per group and orders groups by the power ratio
/// it needs (ties to the lower index). Step 3 sweeps that order, raising one
/// group one level at a time and keeping the raise only if it fits in the
/// power budget and does not lower the discrete objective. Sweeps stop when
/// none is kept, or after as many sweeps as the table has rows.
pub fn refine_modcod(
    frame: &Frame,
    table: &ModcodTable,
    gamma_min: f64,
    cfg: &SolverConfig,
    start: &PrecodingMatrix,
) -> Result<ModcodOutput> {
    check_gamma(table, gamma_min)?;
    cfg.validate()?;
    let dead = frame.degenerate_groups();
    let g = frame.n_groups();
    let mins_of = |w: &PrecodingMatrix| group_min_sinr(&sinr(w, frame), &frame.partition);
    let mut step = 0;
    let mut trace = Vec::new();

    // Step 1.
    let mut cur = start.clone();
    let mut cur_obj = discrete_objective(&cur, frame, table);
    let floors = floored_targets(&mins_of(&cur), table, gamma_min, &dead);
    let mut r_cur = f64::NAN;
    if let Some((w, r)) = attempt(frame, &floors, cfg, &cur, step) {
        let obj = discrete_objective(&w, frame, table);
        if obj >= cur_obj {
            cur = w;
            cur_obj = obj;
            r_cur = r;
        }
    }
    trace.push(IterationLog {
        iteration: step,
        objective: cur_obj,
        r_star: r_cur,
        accepted: true,
    });

    // Targets for a one-level raise of group `j` from state `w`.
    let raised = |w: &PrecodingMatrix, j: usize| -> Option<Vec<f64>> {
        let mins = mins_of(w);
        let mut t = floored_targets(&mins, table, gamma_min, &dead);
        let next = table.tier(mins[j]).map_or(0, |k| k + 1);
        if dead[j] || next >= table.len() {
            return None;
        }
        t[j] = threshold(table, next).max(gamma_min);
        Some(t)
    };

    // Step 2.
    let mut probe: Vec<(f64, usize)> = Vec::with_capacity(g);
    for j in 0..g {
        step += 1;
        let r = raised(&cur, j)
            .and_then(|t| {
                let step_cfg = SolverConfig {
                    rng_seed: iteration_seed(cfg.rng_seed, 1000 + step),
                    ..cfg.clone()
                };
                solve_qos_with(frame, &per_user(frame, &t), &step_cfg, &[cur.directions()]).ok()
            })
            .map_or(f64::INFINITY, |q| q.r_star);
        probe.push((r, j));
    }
    probe.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = probe.iter().map(|p| p.1).collect();

    // Step 3.
    for _sweep in 0..table.len() {
        let mut any = false;
        for &j in &order {
            let Some(t) = raised(&cur, j) else { continue };
            step += 1;
            let mut log = IterationLog {
                iteration: step,
                objective: cur_obj,
                r_star: f64::NAN,
                accepted: false,
            };
            if let Some((w, r)) = attempt(frame, &t, cfg, &cur, step) {
                let obj = discrete_objective(&w, frame, table);
                log.r_star = r;
                if obj >= cur_obj {
                    cur = w;
                    cur_obj = obj;
                    any = true;
                    log.objective = obj;
                    log.accepted = true;
                }
            }
            trace.push(log);
        }
        if !any {
            break;
        }
    }
    Ok(ModcodOutput {
        w: cur,
        objective: cur_obj,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precoding::sinr::pac_ratio;
    use crate::{CMat, GroupPartition};
    use num_complex::Complex64;

    fn frame() -> Frame {
        let h = CMat::from_fn(4, 2, |i, j| {
            Complex64::new(if i / 2 == j { 1.0 } else { 0.25 }, 0.1 * i as f64)
        });
        Frame::new(h, GroupPartition::consecutive(2, 2), vec![20.0, 20.0]).unwrap()
    }

    #[test]
    fn accepted_steps_never_lower_the_objective() {
        let f = frame();
        let table = ModcodTable::dvb_s2x();
        let gmin = db_to_linear(table.lowest_threshold_db());
        let out = max_throughput_modcod(&f, &table, gmin, &SolverConfig::default()).unwrap();
        let mut last = f64::NEG_INFINITY;
        for l in out.trace.iter().filter(|l| l.accepted) {
            assert!(l.objective >= last);
            last = l.objective;
        }
        assert!(pac_ratio(&out.w, &f.p_ant) <= 1.0 + 1e-6);
        assert!(sinr(&out.w, &f).iter().all(|s| *s >= gmin));
        assert!((out.objective - discrete_objective(&out.w, &f, &table)).abs() < 1e-12);
    }

    #[test]
    fn gamma_below_table_is_rejected() {
        let table = ModcodTable::dvb_s2x();
        let r = max_throughput_modcod(&frame(), &table, 0.1, &SolverConfig::default());
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
