#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use satprecode::precoding::Frame;
use satprecode::{CMat, GroupPartition};

pub fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// i.i.d. CN(0,1) channel, `n_t` groups of `rho` users, unit noise.
pub fn iid_frame(seed: u64, n_t: usize, rho: usize, p_n: f64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = CMat::from_fn(n_t * rho, n_t, |_, _| cn(&mut rng));
    Frame::new(h, GroupPartition::consecutive(n_t, rho), vec![p_n; n_t]).unwrap()
}

/// Beam-like channel: group `k` sees antenna `k` with unit gain plus a
/// weaker random coupling to every antenna.
pub fn desk_frame(seed: u64, n_t: usize, rho: usize) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coupling = rng.random_range(0.2..0.5);
    let p_n = rng.random_range(2.0..20.0);
    let h = CMat::from_fn(n_t * rho, n_t, |i, n| {
        let own = if i / rho == n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        own + cn(&mut rng) * coupling
    });
    Frame::new(h, GroupPartition::consecutive(n_t, rho), vec![p_n; n_t]).unwrap()
}

/// `|h_iᵀ v|²` for a unit vector `(cos θ, sin θ e^{jφ})`.
fn gain(h: &CMat, i: usize, theta: f64, phi: f64) -> f64 {
    let z = h[(i, 0)] * theta.cos() + h[(i, 1)] * Complex64::from_polar(theta.sin(), phi);
    z.norm_sqr()
}

/// Smallest group powers meeting every target, by the fixed-point
/// iteration `p ← max_i γ_i (interference_i + σ_i²)/a_ik` started at zero.
/// `a[i][k]` is the gain of user `i` on direction `k`.
pub fn yates_powers(a: &[Vec<f64>], groups: &[Vec<usize>], noise: &[f64], targets: &[f64]) -> Option<Vec<f64>> {
    let g = groups.len();
    let mut p = vec![0.0; g];
    for _ in 0..2000 {
        let mut next = vec![0.0; g];
        for (k, grp) in groups.iter().enumerate() {
            for &i in grp {
                if targets[i] <= 0.0 {
                    continue;
                }
                if a[i][k] <= 0.0 {
                    return None;
                }
                let interference: f64 = (0..g).filter(|&l| l != k).map(|l| p[l] * a[i][l]).sum();
                next[k] = f64::max(next[k], targets[i] * (interference + noise[i]) / a[i][k]);
            }
        }
        let change = next.iter().zip(&p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let size = next.iter().copied().fold(0.0, f64::max);
        if size > 1e12 {
            return None;
        }
        p = next;
        if change <= 1e-13 * size.max(1e-300) {
            return Some(p);
        }
    }
    None
}

/// Antenna load ratio of two unit directions with powers `p`.
fn load_ratio_2(x: &[f64; 4], p: &[f64], p_ant: &[f64]) -> f64 {
    let l0 = p[0] * x[0].cos().powi(2) + p[1] * x[2].cos().powi(2);
    let l1 = p[0] * x[0].sin().powi(2) + p[1] * x[2].sin().powi(2);
    (l0 / p_ant[0]).max(l1 / p_ant[1])
}

/// Compass search from `start`, shrinking the step until `min_step`.
fn compass<const D: usize>(mut x: [f64; D], mut step: f64, min_step: f64, f: impl Fn(&[f64; D]) -> f64) -> ([f64; D], f64) {
    let mut fx = f(&x);
    while step > min_step {
        let mut moved = false;
        for d in 0..D {
            for s in [step, -step] {
                let mut y = x;
                y[d] += s;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    (x, fx)
}

/// Direction grid over `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)`.
fn direction_grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for a in 0..=n_theta {
        for b in 0..n_phi {
            out.push((FRAC_PI_2 * a as f64 / n_theta as f64, TAU * b as f64 / n_phi as f64));
        }
    }
    out
}

/// Minimum worst-antenna load ratio meeting per-user `targets` with two
/// groups and two antennas: exhaustive search over both beam directions,
/// minimal powers by fixed-point iteration, then a compass refinement from
/// the best few grid points.
pub fn qos_grid_2x2(frame: &Frame, targets: &[f64], n_theta: usize, n_phi: usize) -> f64 {
    assert_eq!(frame.n_antennas(), 2);
    assert_eq!(frame.n_groups(), 2);
    let groups = frame.partition.groups().to_vec();
    let n_users = frame.h.nrows();
    let eval = |x: &[f64; 4]| -> f64 {
        let a: Vec<Vec<f64>> = (0..n_users)
            .map(|i| vec![gain(&frame.h, i, x[0], x[1]), gain(&frame.h, i, x[2], x[3])])
            .collect();
        match yates_powers(&a, &groups, &frame.noise, targets) {
            Some(p) => load_ratio_2(x, &p, &frame.p_ant),
            None => f64::INFINITY,
        }
    };
    let dirs = direction_grid(n_theta, n_phi);
    let gains: Vec<Vec<f64>> = dirs
        .iter()
        .map(|&(t, f)| (0..n_users).map(|i| gain(&frame.h, i, t, f)).collect())
        .collect();
    let mut best: Vec<(f64, [f64; 4])> = Vec::new();
    for (d1, g1) in dirs.iter().zip(&gains) {
        for (d2, g2) in dirs.iter().zip(&gains) {
            let a: Vec<Vec<f64>> = (0..n_users).map(|i| vec![g1[i], g2[i]]).collect();
            let Some(p) = yates_powers(&a, &groups, &frame.noise, targets) else { continue };
            let x = [d1.0, d1.1, d2.0, d2.1];
            let r = load_ratio_2(&x, &p, &frame.p_ant);
            if best.len() < 8 || r < best[best.len() - 1].0 {
                best.push((r, x));
                best.sort_by(|u, v| u.0.total_cmp(&v.0));
                best.truncate(8);
            }
        }
    }
    let step = FRAC_PI_2 / n_theta as f64;
    best.iter()
        .map(|(_, x)| compass(*x, step, 1e-9, eval).1)
        .fold(f64::INFINITY, f64::min)
}

/// `Σ_k log2(1 + min_{i∈G_k} SINR_i)` for two directions and powers.
fn sum_rate_2(frame: &Frame, a: &[[f64; 2]], p: [f64; 2]) -> f64 {
    frame
        .partition
        .groups()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let worst = g
                .iter()
                .map(|&i| p[k] * a[i][k] / (p[1 - k] * a[i][1 - k] + frame.noise[i]))
                .fold(f64::INFINITY, f64::min);
            (1.0 + worst).log2()
        })
        .sum()
}

/// Powers along `(cos²α, sin²α)` scaled onto the per-antenna limits.
fn boundary_powers(x: &[f64; 4], alpha: f64, p_ant: &[f64]) -> [f64; 2] {
    let p = [alpha.cos().powi(2), alpha.sin().powi(2)];
    let r = load_ratio_2(x, &p, p_ant);
    [p[0] / r, p[1] / r]
}

/// Maximum sum rate with two groups and two antennas under per-antenna
/// limits. Raising every power by a common factor raises every SINR, so
/// the optimum lies where the worst antenna is at its limit; the search
/// covers both directions and the power split along that boundary.
pub fn sum_rate_grid_2x2(frame: &Frame, n_theta: usize, n_phi: usize, n_alpha: usize) -> f64 {
    assert_eq!(frame.n_antennas(), 2);
    assert_eq!(frame.n_groups(), 2);
    let n_users = frame.h.nrows();
    let eval = |x: &[f64; 5]| -> f64 {
        let dirs = [x[0], x[1], x[2], x[3]];
        let a: Vec<[f64; 2]> = (0..n_users)
            .map(|i| [gain(&frame.h, i, x[0], x[1]), gain(&frame.h, i, x[2], x[3])])
            .collect();
        let alpha = x[4].clamp(0.0, FRAC_PI_2);
        -sum_rate_2(frame, &a, boundary_powers(&dirs, alpha, &frame.p_ant))
    };
    let dirs = direction_grid(n_theta, n_phi);
    let gains: Vec<Vec<f64>> = dirs
        .iter()
        .map(|&(t, f)| (0..n_users).map(|i| gain(&frame.h, i, t, f)).collect())
        .collect();
    let mut best: Vec<(f64, [f64; 5])> = Vec::new();
    for (d1, g1) in dirs.iter().zip(&gains) {
        for (d2, g2) in dirs.iter().zip(&gains) {
            let a: Vec<[f64; 2]> = (0..n_users).map(|i| [g1[i], g2[i]]).collect();
            let x4 = [d1.0, d1.1, d2.0, d2.1];
            for s in 0..=n_alpha {
                let alpha = FRAC_PI_2 * s as f64 / n_alpha as f64;
                let v = -sum_rate_2(frame, &a, boundary_powers(&x4, alpha, &frame.p_ant));
                if best.len() < 8 || v < best[best.len() - 1].0 {
                    best.push((v, [x4[0], x4[1], x4[2], x4[3], alpha]));
                    best.sort_by(|u, w| u.0.total_cmp(&w.0));
                    best.truncate(8);
                }
            }
        }
    }
    let step = FRAC_PI_2 / n_theta as f64;
    -best
        .iter()
        .map(|(_, x)| compass(*x, step, 1e-9, eval).1)
        .fold(f64::INFINITY, f64::min)
}

/// Mean and standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Pearson χ² statistic of observed counts against expected counts.
pub fn chi_square(observed: &[usize], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}
