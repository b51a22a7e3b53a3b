//! QoS-constrained precoding: minimize the worst antenna load ratio subject
//! to per-user SINR targets, by semidefinite relaxation and Gaussian
//! randomization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use satprecode_conic::{solve_lp, solve_sdp, BlockId, LpProblem, SdpProblem, Sense, Status};

use super::sinr::{gains, sinr_from_gains};
use super::types::{Frame, PrecodingMatrix, QosResult, SolverConfig};
use crate::{CMat, Error, Result};

/// Relative margin on SINR targets when computing candidate powers, so that
/// rounding never leaves a user a hair below its target.
const TARGET_MARGIN: f64 = 1e-9;

/// Optimal covariance matrices of the relaxation.
#[derive(Debug, Clone)]
pub struct SdrSolution {
    /// `X_k` per group; `None` for groups without constraints.
    pub covariances: Vec<Option<CMat>>,
    pub lower_bound: f64,
}

/// Users with a positive target, per group.
fn constrained_users(frame: &Frame, targets: &[f64]) -> Vec<Vec<usize>> {
    frame
        .partition
        .groups()
        .iter()
        .map(|g| g.iter().copied().filter(|&i| targets[i] > 0.0).collect())
        .collect()
}

fn check_targets(frame: &Frame, targets: &[f64]) -> Result<()> {
    if targets.len() != frame.h.nrows() {
        return Err(Error::Dimension(format!(
            "{} targets for {} users",
            targets.len(),
            frame.h.nrows()
        )));
    }
    if let Some(g) = targets.iter().find(|g| !g.is_finite()) {
        return Err(Error::Parameter(format!("SINR target {g} is not finite")));
    }
    Ok(())
}

/// Solves the relaxation of the QoS problem.
///
/// Variables are one Hermitian `X_k` per constrained group plus the load
/// ratio `r`. SINR rows are divided by `γ_i σ_i²` and load rows by `P_n`.
pub fn sdr_relaxation(frame: &Frame, targets: &[f64], cfg: &SolverConfig) -> Result<SdrSolution> {
    check_targets(frame, targets)?;
    let n_t = frame.n_antennas();
    let users = constrained_users(frame, targets);
    for g in &users {
        for &i in g {
            if frame.h.row(i).iter().all(|z| z.norm_sqr() == 0.0) {
                return Err(Error::Infeasible);
            }
        }
    }
    let active: Vec<usize> = (0..users.len()).filter(|&k| !users[k].is_empty()).collect();
    if active.is_empty() {
        return Ok(SdrSolution {
            covariances: vec![None; users.len()],
            lower_bound: 0.0,
        });
    }

    let mut p = SdpProblem::new();
    let blocks: Vec<BlockId> = active.iter().map(|_| p.add_hermitian_block(n_t)).collect();
    let r = p.add_scalar();
    p.set_scalar_cost(r, 1.0);
    for &k in &active {
        for &i in &users[k] {
            let u = frame.h.row(i).transpose().conjugate();
            let gs = targets[i] * frame.noise[i];
            let row = p.add_constraint(Sense::Geq, 1.0);
            for (b, &l) in active.iter().enumerate() {
                let coef = if l == k { 1.0 / gs } else { -1.0 / frame.noise[i] };
                p.add_hermitian_rank_one_term(row, blocks[b], &u, coef);
            }
        }
    }
    for n in 0..n_t {
        let row = p.add_constraint(Sense::Leq, 0.0);
        let mut e = DVector::zeros(n_t);
        e[n] = Complex64::new(1.0, 0.0);
        for &b in &blocks {
            p.add_hermitian_rank_one_term(row, b, &e, 1.0 / frame.p_ant[n]);
        }
        p.add_scalar_term(row, r, -1.0);
    }

    let sol = solve_sdp(&p, cfg.conic_tol)?;
    match sol.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::Infeasible),
        // Accept a slightly inaccurate point: candidates are checked exactly.
        _ if sol.kkt.within(1e-4) => {}
        _ => return Err(Error::RandomizationFailed { sdr_lower_bound: f64::NAN }),
    }
    let mut covariances = vec![None; users.len()];
    for (b, &k) in active.iter().enumerate() {
        covariances[k] = Some(sol.hermitian(blocks[b]));
    }
    Ok(SdrSolution {
        covariances,
        lower_bound: sol.scalar(r),
    })
}

/// Smallest group powers meeting `targets` with fixed unit directions.
///
/// The SINR constraints define a standard interference function, so the
/// feasible set has a componentwise least point. Antenna loads grow with
/// every power, so that point also minimizes the worst load ratio; it is the
/// optimum of the rescaling LP. It is found by policy iteration on the
/// per-group worst user, with the LP as fallback.
pub fn min_powers(v: &CMat, frame: &Frame, targets: &[f64]) -> Option<Vec<f64>> {
    let a = gains(&frame.h, v);
    let users = constrained_users(frame, targets);
    let g = users.len();
    let active: Vec<usize> = (0..g).filter(|&k| !users[k].is_empty()).collect();
    let mut rho = vec![0.0; g];
    if active.is_empty() {
        return Some(rho);
    }
    let gamma = |i: usize| targets[i] * (1.0 + TARGET_MARGIN);
    for &k in &active {
        if users[k].iter().any(|&i| !(a[(i, k)] > 0.0)) {
            return None;
        }
    }
    let need = |rho: &[f64], k: usize, i: usize| -> f64 {
        let mut d = frame.noise[i];
        for &l in &active {
            if l != k {
                d += rho[l] * a[(i, l)];
            }
        }
        gamma(i) * d / a[(i, k)]
    };
    let worst = |rho: &[f64], k: usize| -> (usize, f64) {
        let mut best = (users[k][0], f64::NEG_INFINITY);
        for &i in &users[k] {
            let q = need(rho, k, i);
            if q > best.1 {
                best = (i, q);
            }
        }
        best
    };

    let m = active.len();
    let mut policy: Vec<usize> = active.iter().map(|&k| worst(&rho, k).0).collect();
    for _ in 0..64 {
        let mut lhs = DMatrix::<f64>::identity(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for (r, &k) in active.iter().enumerate() {
            let i = policy[r];
            let s = gamma(i) / a[(i, k)];
            rhs[r] = s * frame.noise[i];
            for (c, &l) in active.iter().enumerate() {
                if l != k {
                    lhs[(r, c)] = -s * a[(i, l)];
                }
            }
        }
        let sol = lhs.lu().solve(&rhs)?;
        if sol.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return None;
        }
        for (r, &k) in active.iter().enumerate() {
            rho[k] = sol[r];
        }
        let mut changed = false;
        for (r, &k) in active.iter().enumerate() {
            let (i, q) = worst(&rho, k);
            if q > rho[k] * (1.0 + 1e-12) && i != policy[r] {
                policy[r] = i;
                changed = true;
            }
        }
        if !changed {
            return Some(rho);
        }
    }
    min_powers_lp(v, frame, targets).map(|(p, _)| p)
}

/// The rescaling LP: minimize `t` over group powers with
/// `load_n(ρ) ≤ t P_n` and every SINR target met. Returns powers and `t`.
pub fn min_powers_lp(v: &CMat, frame: &Frame, targets: &[f64]) -> Option<(Vec<f64>, f64)> {
    let a = gains(&frame.h, v);
    let users = constrained_users(frame, targets);
    let g = users.len();
    let active: Vec<usize> = (0..g).filter(|&k| !users[k].is_empty()).collect();
    if active.is_empty() {
        return Some((vec![0.0; g], 0.0));
    }
    let m = active.len();
    let mut cost = DVector::zeros(m + 1);
    cost[m] = 1.0;
    let mut lp = LpProblem::new(cost);
    for &k in &active {
        for &i in &users[k] {
            let gi = targets[i] * (1.0 + TARGET_MARGIN);
            let mut row = vec![0.0; m + 1];
            for (cl, &l) in active.iter().enumerate() {
                row[cl] = if l == k { a[(i, k)] } else { -gi * a[(i, l)] };
            }
            lp.constraints.geq(&row, gi * frame.noise[i]);
        }
    }
    for n in 0..frame.n_antennas() {
        let mut row = vec![0.0; m + 1];
        for (c, &k) in active.iter().enumerate() {
            row[c] = v[(n, k)].norm_sqr() / frame.p_ant[n];
        }
        row[m] = -1.0;
        lp.constraints.leq(&row, 0.0);
    }
    lp.constraints.nonnegative();
    let sol = solve_lp(&lp, 1e-9).ok()?;
    if sol.status != Status::Optimal {
        return None;
    }
    let mut rho = vec![0.0; g];
    for (c, &k) in active.iter().enumerate() {
        rho[k] = sol.x[c].max(0.0);
    }
    Some((rho, sol.x[m]))
}

/// `max_n load_n / P_n` for directions `v` and powers `rho`.
pub fn load_ratio(v: &CMat, rho: &[f64], p_ant: &[f64]) -> f64 {
    (0..v.nrows())
        .map(|n| {
            let load: f64 = rho.iter().enumerate().map(|(k, p)| p * v[(n, k)].norm_sqr()).sum();
            load / p_ant[n]
        })
        .fold(0.0, f64::max)
}

fn meets_targets(v: &CMat, rho: &[f64], frame: &Frame, targets: &[f64]) -> bool {
    let a = gains(&frame.h, v);
    let s = sinr_from_gains(&a, rho, frame);
    frame
        .partition
        .groups()
        .iter()
        .flatten()
        .all(|&i| targets[i] <= 0.0 || s[i] >= targets[i])
}

fn unit_columns(mut v: CMat) -> CMat {
    for mut c in v.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c.iter_mut().for_each(|z| *z /= n);
        }
    }
    v
}

struct Factor {
    principal: DVector<Complex64>,
    sqrt: CMat,
}

fn factor(x: &CMat) -> Factor {
    let eig = x.clone().symmetric_eigen();
    let n = x.nrows();
    let mut top = 0;
    for j in 1..n {
        if eig.eigenvalues[j] > eig.eigenvalues[top] {
            top = j;
        }
    }
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let s = eig.eigenvalues[j].max(0.0).sqrt();
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    Factor {
        principal: eig.eigenvectors.column(top).into_owned(),
        sqrt: scaled * eig.eigenvectors.adjoint(),
    }
}

pub fn solve_qos(frame: &Frame, targets: &[f64], cfg: &SolverConfig) -> Result<QosResult> {
    solve_qos_with(frame, targets, cfg, &[])
}

/// As [`solve_qos`], with extra candidate direction matrices tried
/// alongside the randomized ones.
pub fn solve_qos_with(
    frame: &Frame,
    targets: &[f64],
    cfg: &SolverConfig,
    seeds: &[CMat],
) -> Result<QosResult> {
    cfg.validate()?;
    let sdr = sdr_relaxation(frame, targets, cfg)?;
    let g = frame.n_groups();
    let n_t = frame.n_antennas();
    let factors: Vec<Option<Factor>> = sdr.covariances.iter().map(|x| x.as_ref().map(factor)).collect();

    let mut best: Option<(f64, CMat, Vec<f64>)> = None;
    let mut consider = |v: CMat| {
        let Some(rho) = min_powers(&v, frame, targets) else { return };
        if !meets_targets(&v, &rho, frame, targets) {
            return;
        }
        let r = load_ratio(&v, &rho, &frame.p_ant);
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, v, rho));
        }
    };

    let mut principal = CMat::zeros(n_t, g);
    for (k, f) in factors.iter().enumerate() {
        if let Some(f) = f {
            principal.set_column(k, &f.principal);
        }
    }
    consider(unit_columns(principal.clone()));
    for s in seeds {
        if s.shape() == (n_t, g) {
            consider(unit_columns(s.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..cfg.n_rand {
        let mut v = CMat::zeros(n_t, g);
        for (k, f) in factors.iter().enumerate() {
            if let Some(f) = f {
                let xi = DVector::from_fn(n_t, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * half, im * half)
                });
                let col = &f.sqrt * xi;
                if col.norm() > 0.0 {
                    v.set_column(k, &col);
                } else {
                    v.set_column(k, &f.principal);
                }
            }
        }
        consider(unit_columns(v));
    }

    match best {
        Some((r_star, v, rho)) => Ok(QosResult {
            r_star,
            w: PrecodingMatrix::from_parts(&v, &rho),
            sdr_lower_bound: sdr.lower_bound,
        }),
        None => Err(Error::RandomizationFailed {
            sdr_lower_bound: sdr.lower_bound,
        }),
    }
}
