//! Max-min fair reference precoder.

use super::qos::solve_qos;
use super::types::{Frame, PrecodingMatrix, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinOutput {
    pub w: PrecodingMatrix,
    /// Largest uniform SINR found feasible (linear).
    pub gamma: f64,
    pub bisections: usize,
}

/// Bisects a common SINR target on a log scale until the bracket is
/// narrower than `rel_tol`. Each probe is a QoS solve; a target is feasible
/// when the power ratio it needs is at most one.
pub fn max_min_fair(frame: &Frame, cfg: &SolverConfig, rel_tol: f64) -> Result<MaxMinOutput> {
    cfg.validate()?;
    if !(rel_tol > 0.0) {
        return Err(Error::Parameter(format!("relative tolerance {rel_tol} must be positive")));
    }
    let n = frame.h.nrows();
    let total: f64 = frame.p_ant.iter().sum();
    let mut hi = frame
        .h
        .row_iter()
        .zip(&frame.noise)
        .map(|(r, s)| r.norm_squared() * total / s)
        .fold(f64::INFINITY, f64::min);
    if !(hi > 0.0) {
        return Err(Error::Infeasible);
    }
    let mut lo = hi * 1e-6;
    let probe = |g: f64| solve_qos(frame, &vec![g; n], cfg).ok().filter(|q| q.r_star <= 1.0);
    let mut best = match probe(lo) {
        Some(q) => (lo, q),
        None => return Err(Error::Infeasible),
    };
    let mut bisections = 0;
    while hi / lo > 1.0 + rel_tol {
        let mid = (lo * hi).sqrt();
        bisections += 1;
        match probe(mid) {
            Some(q) => {
                lo = mid;
                best = (mid, q);
            }
            None => hi = mid,
        }
    }
    let (gamma, q) = best;
    let w = if q.r_star > 0.0 { q.w.scale_powers(1.0 / q.r_star) } else { q.w };
    Ok(MaxMinOutput { w, gamma, bisections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precoding::sinr::{pac_ratio, sinr};
    use crate::{CMat, GroupPartition};
    use num_complex::Complex64;

    #[test]
    fn orthogonal_users_share_one_level() {
        // Each antenna serves one user; the common level is set by the weaker.
        let h = CMat::from_row_slice(2, 2, &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let f = Frame::new(h, GroupPartition::consecutive(2, 1), vec![1.0, 1.0]).unwrap();
        let out = max_min_fair(&f, &SolverConfig::default(), 1e-3).unwrap();
        assert!((out.gamma - 1.0).abs() < 2e-3, "{}", out.gamma);
        let s = sinr(&out.w, &f);
        assert!(s.iter().all(|x| *x >= out.gamma * (1.0 - 1e-6)), "{s:?}");
        assert!(pac_ratio(&out.w, &f.p_ant) <= 1.0 + 1e-6);
    }
}
