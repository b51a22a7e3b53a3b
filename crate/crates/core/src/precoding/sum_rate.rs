//! Sum-rate maximization under per-antenna power constraints, with and
//! without a minimum-SINR (availability) guarantee.

use super::projection::{project_pac, project_pac_availability};
use super::qos::{solve_qos, solve_qos_with};
use super::sinr::{pac_ratio, sinr, sum_rate};
use super::subgradient::subgradient_step;
use super::types::{Frame, IterationLog, PrecodingMatrix, SolverConfig};
use crate::modcod::group_min_sinr;
use crate::{CMat, Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateOutput {
    pub w: PrecodingMatrix,
    /// Sum of per-group rates, bps/Hz.
    pub sum_rate: f64,
    /// One entry per outer iteration; `objective` is the incumbent.
    pub trace: Vec<IterationLog>,
}

#[derive(Debug, Clone, Copy)]
enum Projection {
    Pac,
    Availability(f64),
}

/// Per-iteration seed so that randomizations differ between iterations.
pub(crate) fn iteration_seed(seed: u64, it: usize) -> u64 {
    seed ^ (it as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Equal-amplitude start meeting every per-antenna limit with equality on
/// the weakest antenna.
pub fn uniform_start(frame: &Frame) -> PrecodingMatrix {
    let g = frame.n_groups();
    let p_min = frame.p_ant.iter().copied().fold(f64::INFINITY, f64::min);
    let a = (p_min / g as f64).sqrt();
    PrecodingMatrix::new(CMat::from_element(frame.n_antennas(), g, Complex64::new(a, 0.0)))
}

fn per_user_targets(frame: &Frame, group_targets: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; frame.h.nrows()];
    for (k, g) in frame.partition.groups().iter().enumerate() {
        for &i in g {
            t[i] = group_targets[k];
        }
    }
    t
}

fn rescale(w: PrecodingMatrix, r_star: f64) -> PrecodingMatrix {
    if r_star > 0.0 && r_star.is_finite() {
        w.scale_powers(1.0 / r_star)
    } else {
        w
    }
}

fn outer_loop(frame: &Frame, cfg: &SolverConfig, init: PrecodingMatrix, mode: Projection) -> Result<SumRateOutput> {
    cfg.validate()?;
    let mut cur = init;
    let mut cur_sinr = sinr(&cur, frame);
    let mut best = cur.clone();
    let mut best_sr = sum_rate(&cur_sinr, frame);
    let mut prev_sr = best_sr;
    let mut trace = vec![IterationLog {
        iteration: 0,
        objective: best_sr,
        r_star: pac_ratio(&cur, &frame.p_ant),
        accepted: true,
    }];
    for it in 1..=cfg.outer_max_iters {
        let mut delta = cfg.delta0;
        let mut mins = group_min_sinr(&cur_sinr, &frame.partition);
        if let Projection::Availability(g) = mode {
            mins.iter_mut().for_each(|m| *m = m.max(g));
        }
        let targets = per_user_targets(frame, &mins);
        let step_cfg = SolverConfig {
            rng_seed: iteration_seed(cfg.rng_seed, it),
            ..cfg.clone()
        };
        let q = match solve_qos_with(frame, &targets, &step_cfg, &[cur.directions()]) {
            Ok(q) => q,
            Err(e) if it == 1 => return Err(e),
            Err(_) => break,
        };
        let w = rescale(q.w, q.r_star);
        let v = w.directions();
        let mut s = w.log_powers();
        let mut powers = w.powers();
        let mut failed = false;
        for _ in 0..cfg.t_max {
            let r = subgradient_step(&s, &v, frame);
            for (sk, rk) in s.iter_mut().zip(&r) {
                if sk.is_finite() {
                    *sk -= delta * rk;
                }
            }
            delta /= 2.0;
            let x: Vec<f64> = s.iter().map(|v| v.exp()).collect();
            let projected = match mode {
                Projection::Pac => project_pac(&x, &v, &frame.p_ant),
                Projection::Availability(g) => project_pac_availability(&x, &v, frame, g),
            };
            match projected {
                Ok(p) => {
                    s = p.iter().map(|x| x.ln()).collect();
                    powers = p;
                }
                Err(Error::Infeasible) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            break;
        }
        cur = PrecodingMatrix::from_parts(&v, &powers);
        cur_sinr = sinr(&cur, frame);
        let sr = sum_rate(&cur_sinr, frame);
        let improved = sr > best_sr;
        if improved {
            best = cur.clone();
            best_sr = sr;
        }
        trace.push(IterationLog {
            iteration: it,
            objective: best_sr,
            r_star: q.r_star,
            accepted: improved,
        });
        if (sr - prev_sr).abs() < cfg.outer_tol * prev_sr.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        prev_sr = sr;
    }
    Ok(SumRateOutput {
        w: best,
        sum_rate: best_sr,
        trace,
    })
}

/// Alternates QoS precoding at the current per-group SINRs with projected
/// subgradient power steps, keeping the best iterate.
///
/// The loop runs from [`uniform_start`] and again from [`slnr_start`], then
/// once more after each group switched off by the drop move; the best
/// result is returned. Each run's trace continues the previous one, with
/// the incumbent carried over.
pub fn max_sum_rate(frame: &Frame, cfg: &SolverConfig) -> Result<SumRateOutput> {
    let first = outer_loop(frame, cfg, uniform_start(frame), Projection::Pac)?;
    let second_cfg = SolverConfig {
        rng_seed: iteration_seed(cfg.rng_seed, 500),
        ..cfg.clone()
    };
    let mut out = match outer_loop(frame, &second_cfg, slnr_start(frame), Projection::Pac) {
        Ok(second) => merge(first, second),
        Err(_) => first,
    };
    for round in 1..=frame.n_groups() {
        let cfg = SolverConfig {
            rng_seed: iteration_seed(cfg.rng_seed, 500 + round),
            ..cfg.clone()
        };
        let Some(w) = best_drop(frame, &out, &cfg) else { break };
        match outer_loop(frame, &cfg, w, Projection::Pac) {
            Ok(next) => out = merge(out, next),
            Err(_) => break,
        }
    }
    Ok(out)
}

/// Switching one group off, when that beats the incumbent. Every group is
/// tried with the others scaled back onto the power limits; the weakest is
/// also tried with the others re-solved at their current worst SINRs.
/// Log-power steps never reach zero power, so this move is taken
/// separately.
fn best_drop(frame: &Frame, out: &SumRateOutput, cfg: &SolverConfig) -> Option<PrecodingMatrix> {
    let powers = out.w.powers();
    let mins = group_min_sinr(&sinr(&out.w, frame), &frame.partition);
    let active: Vec<usize> = (0..frame.n_groups()).filter(|&k| powers[k] > 0.0).collect();
    let without = |k: usize| {
        let mut w = out.w.clone();
        w.w.column_mut(k).fill(Complex64::new(0.0, 0.0));
        w
    };
    let mut candidates: Vec<PrecodingMatrix> = active.iter().map(|&k| without(k)).collect();
    if let Some(&k) = active.iter().min_by(|&&a, &&b| mins[a].total_cmp(&mins[b]).then(a.cmp(&b))) {
        let mut targets = mins.clone();
        targets[k] = 0.0;
        let seed = without(k).directions();
        if let Ok(q) = solve_qos_with(frame, &per_user_targets(frame, &targets), cfg, &[seed]) {
            candidates.push(q.w);
        }
    }
    let mut best: Option<(f64, PrecodingMatrix)> = None;
    for w in candidates {
        let r = pac_ratio(&w, &frame.p_ant);
        if !(r > 0.0 && r.is_finite()) {
            continue;
        }
        let w = w.scale_powers(1.0 / r);
        let sr = sum_rate(&sinr(&w, frame), frame);
        if sr > best.as_ref().map_or(out.sum_rate, |b| b.0) {
            best = Some((sr, w));
        }
    }
    best.map(|b| b.1)
}

fn merge(first: SumRateOutput, second: SumRateOutput) -> SumRateOutput {
    let offset = first.trace.last().map_or(0, |l| l.iteration + 1);
    let mut best = first.sum_rate;
    let mut trace = first.trace;
    for l in second.trace {
        let accepted = l.objective > best;
        best = best.max(l.objective);
        trace.push(IterationLog {
            iteration: offset + l.iteration,
            objective: best,
            r_star: l.r_star,
            accepted,
        });
    }
    if second.sum_rate > first.sum_rate {
        SumRateOutput { trace, ..second }
    } else {
        SumRateOutput { trace, ..first }
    }
}

/// Max-SLNR directions with equal powers scaled onto the power limits:
/// `v_k` is the principal generalized eigenvector of
/// `(R_k, Σ_{l≠k} R_l + σ̄²/p̄ I)` with `R_k = Σ_{i∈G_k} h_i* h_iᵀ`.
pub fn slnr_start(frame: &Frame) -> PrecodingMatrix {
    let n_t = frame.n_antennas();
    let g = frame.n_groups();
    let cov: Vec<CMat> = frame
        .partition
        .groups()
        .iter()
        .map(|grp| {
            let mut r = CMat::zeros(n_t, n_t);
            for &i in grp {
                let h = frame.h.row(i).transpose();
                r += h.conjugate() * h.transpose();
            }
            r
        })
        .collect();
    let total: CMat = cov.iter().fold(CMat::zeros(n_t, n_t), |a, r| a + r);
    let noise = frame.noise.iter().sum::<f64>() / frame.noise.len() as f64;
    let per_group = frame.p_ant.iter().sum::<f64>() / g as f64;
    let mut v = CMat::zeros(n_t, g);
    for (k, r) in cov.iter().enumerate() {
        let mut b = &total - r;
        for n in 0..n_t {
            b[(n, n)] += Complex64::new(noise / per_group, 0.0);
        }
        let Some(chol) = b.cholesky() else { continue };
        let l_inv = chol.l().try_inverse().unwrap_or_else(|| CMat::identity(n_t, n_t));
        let m = &l_inv * r * l_inv.adjoint();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = m.symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let u = eig.eigenvectors.column(top).into_owned();
        let col = l_inv.adjoint() * u;
        let norm = col.norm();
        if norm > 0.0 {
            v.set_column(k, &(col / Complex64::new(norm, 0.0)));
        }
    }
    let w = PrecodingMatrix::from_parts(&v, &vec![1.0; g]);
    let r = pac_ratio(&w, &frame.p_ant);
    if r > 0.0 {
        w.scale_powers(1.0 / r)
    } else {
        uniform_start(frame)
    }
}

/// As [`max_sum_rate`] with every user kept at SINR ≥ `gamma_min` (linear).
///
/// The first start is the QoS solution at the uniform target `gamma_min`,
/// scaled up onto the power limits. If that needs more than the available
/// power the problem is reported infeasible. A second run starts from the
/// QoS solution at the worst SINRs of [`slnr_start`]; the better result is
/// returned.
pub fn max_sum_rate_available(frame: &Frame, gamma_min: f64, cfg: &SolverConfig) -> Result<SumRateOutput> {
    if !(gamma_min > 0.0) {
        return max_sum_rate(frame, cfg);
    }
    let targets = vec![gamma_min; frame.h.nrows()];
    let q = solve_qos(frame, &targets, cfg)?;
    if q.r_star > 1.0 {
        return Err(Error::Infeasible);
    }
    let init = rescale(q.w, q.r_star);
    let first = outer_loop(frame, cfg, init, Projection::Availability(gamma_min))?;
    let second_cfg = SolverConfig {
        rng_seed: iteration_seed(cfg.rng_seed, 500),
        ..cfg.clone()
    };
    let Some(init) = available_slnr_start(frame, gamma_min, &second_cfg) else { return Ok(first) };
    match outer_loop(frame, &second_cfg, init, Projection::Availability(gamma_min)) {
        Ok(second) => Ok(merge(first, second)),
        Err(_) => Ok(first),
    }
}

/// QoS solution at the worst SINRs of [`slnr_start`], floored at
/// `gamma_min` and scaled onto the power limits.
fn available_slnr_start(frame: &Frame, gamma_min: f64, cfg: &SolverConfig) -> Option<PrecodingMatrix> {
    let w = slnr_start(frame);
    let mins: Vec<f64> = group_min_sinr(&sinr(&w, frame), &frame.partition)
        .iter()
        .map(|m| m.max(gamma_min))
        .collect();
    let q = solve_qos_with(frame, &per_user_targets(frame, &mins), cfg, &[w.directions()]).ok()?;
    (q.r_star <= 1.0).then(|| rescale(q.w, q.r_star))
}
