use nalgebra::DVector;
use num_complex::Complex64;

use crate::partition::GroupPartition;
use crate::{CMat, Error, Result};

/// One transmission: the channel of the scheduled users, their grouping,
/// noise powers and the per-antenna power limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub h: CMat,
    pub partition: GroupPartition,
    pub noise: Vec<f64>,
    pub p_ant: Vec<f64>,
}

impl Frame {
    /// Unit noise for every user.
    pub fn new(h: CMat, partition: GroupPartition, p_ant: Vec<f64>) -> Result<Self> {
        let noise = vec![1.0; h.nrows()];
        Self::with_noise(h, partition, noise, p_ant)
    }

    pub fn with_noise(h: CMat, partition: GroupPartition, noise: Vec<f64>, p_ant: Vec<f64>) -> Result<Self> {
        partition.check_rows(h.nrows())?;
        if noise.len() != h.nrows() {
            return Err(Error::Dimension(format!("{} noise powers for {} users", noise.len(), h.nrows())));
        }
        if p_ant.len() != h.ncols() {
            return Err(Error::Dimension(format!("{} power limits for {} antennas", p_ant.len(), h.ncols())));
        }
        if let Some(p) = p_ant.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::Parameter(format!("per-antenna limit {p} must be positive")));
        }
        if let Some(s) = noise.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Parameter(format!("noise power {s} must be positive")));
        }
        if !h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Parameter("channel has non-finite entries".into()));
        }
        Ok(Self { h, partition, noise, p_ant })
    }

    pub fn n_antennas(&self) -> usize {
        self.h.ncols()
    }

    pub fn n_groups(&self) -> usize {
        self.partition.n_groups()
    }

    /// Groups whose every member has an all-zero channel.
    pub fn degenerate_groups(&self) -> Vec<bool> {
        self.partition
            .groups()
            .iter()
            .map(|g| g.iter().all(|&u| self.h.row(u).iter().all(|z| z.norm_sqr() == 0.0)))
            .collect()
    }
}

/// Columns `w_k`, one per group.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    pub w: CMat,
}

impl PrecodingMatrix {
    pub fn new(w: CMat) -> Self {
        Self { w }
    }

    pub fn zeros(n_antennas: usize, n_groups: usize) -> Self {
        Self { w: CMat::zeros(n_antennas, n_groups) }
    }

    /// `w_k = sqrt(p_k) v_k`.
    pub fn from_parts(directions: &CMat, powers: &[f64]) -> Self {
        let mut w = directions.clone();
        for (k, p) in powers.iter().enumerate() {
            let s = p.max(0.0).sqrt();
            w.column_mut(k).iter_mut().for_each(|z| *z *= s);
        }
        Self { w }
    }

    pub fn n_groups(&self) -> usize {
        self.w.ncols()
    }

    /// `p_k = ‖w_k‖²`.
    pub fn powers(&self) -> Vec<f64> {
        self.w.column_iter().map(|c| c.norm_squared()).collect()
    }

    /// `log p_k`; `-∞` for zero columns.
    pub fn log_powers(&self) -> Vec<f64> {
        self.powers().into_iter().map(f64::ln).collect()
    }

    /// Unit-norm columns; zero columns stay zero.
    pub fn directions(&self) -> CMat {
        let mut v = self.w.clone();
        for mut c in v.column_iter_mut() {
            let n = c.norm();
            if n > 0.0 {
                c.iter_mut().for_each(|z| *z /= n);
            }
        }
        v
    }

    /// Multiplies every power by `factor`.
    pub fn scale_powers(&self, factor: f64) -> Self {
        Self { w: &self.w * Complex64::new(factor.sqrt(), 0.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Subgradient steps per outer iteration.
    pub t_max: usize,
    /// First step size; halved after every step.
    pub delta0: f64,
    /// Gaussian randomizations per QoS solve.
    pub n_rand: usize,
    /// Relative sum-rate change that ends the outer loop.
    pub outer_tol: f64,
    pub outer_max_iters: usize,
    pub rng_seed: u64,
    /// Tolerance handed to the conic solvers.
    pub conic_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_max: 1,
            delta0: 0.4,
            n_rand: 100,
            outer_tol: 1e-3,
            outer_max_iters: 20,
            rng_seed: 0,
            conic_tol: 1e-7,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::Parameter("t_max must be at least 1".into()));
        }
        if !(self.delta0 > 0.0) {
            return Err(Error::Parameter("delta0 must be positive".into()));
        }
        if self.n_rand == 0 {
            return Err(Error::Parameter("n_rand must be at least 1".into()));
        }
        if !(self.outer_tol >= 0.0) || self.outer_max_iters == 0 {
            return Err(Error::Parameter("outer loop settings are invalid".into()));
        }
        if !(self.conic_tol > 0.0) {
            return Err(Error::Parameter("conic_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QosResult {
    /// Largest ratio of antenna power to its limit.
    pub r_star: f64,
    pub w: PrecodingMatrix,
    pub sdr_lower_bound: f64,
}

/// One line of an algorithm trace.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    /// Sum rate (bps/Hz) or discretized throughput, depending on the algorithm.
    pub objective: f64,
    pub r_star: f64,
    pub accepted: bool,
}

/// Unit-norm vector helper used by tests and scheduling.
pub fn normalized(v: &DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    if n > 0.0 {
        v / Complex64::new(n, 0.0)
    } else {
        v.clone()
    }
}
