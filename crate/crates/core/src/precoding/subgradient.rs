//! Supergradient of the sum of per-group rates with respect to log-powers.

use super::sinr::gains;
use super::types::Frame;
use crate::CMat;

/// `U(s) = Σ_k log2(1 + min_{i∈G_k} SINR_i)` with powers `p = exp(s)`.
pub fn utility(s: &[f64], v: &CMat, frame: &Frame) -> f64 {
    let p: Vec<f64> = s.iter().map(|x| x.exp()).collect();
    let a = gains(&frame.h, v);
    frame
        .partition
        .groups()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let worst = g
                .iter()
                .map(|&i| worst_term(&a, &p, frame, k, i).0)
                .fold(f64::INFINITY, f64::min);
            if worst.is_finite() {
                (1.0 + worst).log2()
            } else {
                0.0
            }
        })
        .sum()
}

/// SINR of user `i` in group `k` and its interference-plus-noise power.
fn worst_term(a: &nalgebra::DMatrix<f64>, p: &[f64], frame: &Frame, k: usize, i: usize) -> (f64, f64) {
    let mut d = frame.noise[i];
    for (l, pl) in p.iter().enumerate() {
        if l != k {
            d += pl * a[(i, l)];
        }
    }
    (p[k] * a[(i, k)] / d, d)
}

/// Direction `r` such that `s − δ r` ascends `U`, i.e. `r = −∇U` with the
/// worst user of each group taken as active.
///
/// `r_j = −Σ_k SINR_k/((1+SINR_k) ln 2) · (1{j=k} − 1{j≠k} p_j a_{m_k j}/D_{m_k})`.
pub fn subgradient_step(s: &[f64], v: &CMat, frame: &Frame) -> Vec<f64> {
    let p: Vec<f64> = s.iter().map(|x| x.exp()).collect();
    let a = gains(&frame.h, v);
    let mut r = vec![0.0; p.len()];
    for (k, g) in frame.partition.groups().iter().enumerate() {
        if g.is_empty() || !(p[k] > 0.0) {
            continue;
        }
        let mut worst = (f64::INFINITY, 1.0, g[0]);
        for &i in g {
            let (sinr, d) = worst_term(&a, &p, frame, k, i);
            if sinr < worst.0 {
                worst = (sinr, d, i);
            }
        }
        let (sinr, d, m) = worst;
        if !(sinr > 0.0) {
            continue;
        }
        let w = sinr / ((1.0 + sinr) * std::f64::consts::LN_2);
        r[k] -= w;
        for (j, pj) in p.iter().enumerate() {
            if j != k {
                r[j] += w * pj * a[(m, j)] / d;
            }
        }
    }
    r
}
