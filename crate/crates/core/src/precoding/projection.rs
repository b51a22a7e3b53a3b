//! Euclidean projections of group powers onto the per-antenna power set,
//! optionally intersected with a minimum-SINR set.

use nalgebra::DVector;
use satprecode_conic::{solve_qp, QpProblem, Status};

use super::qos::{load_ratio, min_powers};
use super::sinr::{gains, sinr_from_gains};
use super::types::Frame;
use crate::{CMat, Error, Result};

/// Relative margin on the minimum SINR inside the projection QP.
const AVAILABILITY_MARGIN: f64 = 1e-5;

fn loads(v: &CMat, p: &[f64]) -> Vec<f64> {
    (0..v.nrows())
        .map(|n| p.iter().enumerate().map(|(k, pk)| pk * v[(n, k)].norm_sqr()).sum())
        .collect()
}

fn pac_feasible(v: &CMat, p: &[f64], p_ant: &[f64]) -> bool {
    p.iter().all(|x| *x >= 0.0) && loads(v, p).iter().zip(p_ant).all(|(l, cap)| l <= cap)
}

fn zero_columns(v: &CMat) -> Vec<bool> {
    v.column_iter().map(|c| c.norm_squared() == 0.0).collect()
}

/// Clips negatives, zeroes unused groups and scales down onto the PAC set.
fn clean(v: &CMat, mut p: Vec<f64>, p_ant: &[f64]) -> Vec<f64> {
    for (pk, z) in p.iter_mut().zip(zero_columns(v)) {
        if z || !(*pk > 0.0) {
            *pk = 0.0;
        }
    }
    let r = load_ratio(v, &p, p_ant);
    if r > 1.0 {
        p.iter_mut().for_each(|x| *x /= r);
    }
    p
}

fn base_problem(x: &[f64], v: &CMat, p_ant: &[f64]) -> QpProblem {
    let g = x.len();
    let mut qp = QpProblem::projection(&DVector::from_column_slice(x));
    for n in 0..v.nrows() {
        let row: Vec<f64> = (0..g).map(|k| v[(n, k)].norm_sqr() / p_ant[n]).collect();
        qp.constraints.leq(&row, 1.0);
    }
    for (k, z) in zero_columns(v).into_iter().enumerate() {
        let hi = if z { 0.0 } else { f64::INFINITY };
        qp.constraints.bound(k, 0.0, hi);
    }
    qp
}

/// Closest powers (Euclidean) to `x` whose antenna loads with unit
/// directions `v` stay within `p_ant`.
pub fn project_pac(x: &[f64], v: &CMat, p_ant: &[f64]) -> Result<Vec<f64>> {
    if x.len() != v.ncols() || p_ant.len() != v.nrows() {
        return Err(Error::Dimension("projection inputs disagree".into()));
    }
    if x.iter().any(|p| !p.is_finite()) {
        return Err(Error::Parameter("powers must be finite".into()));
    }
    let zeros = zero_columns(v);
    if pac_feasible(v, x, p_ant) && x.iter().zip(&zeros).all(|(p, z)| !z || *p == 0.0) {
        return Ok(x.to_vec());
    }
    let sol = solve_qp(&base_problem(x, v, p_ant), 1e-9)?;
    match sol.status {
        Status::Optimal | Status::MaxIterations => Ok(clean(v, sol.x.iter().copied().collect(), p_ant)),
        // The origin is always feasible.
        _ => Ok(vec![0.0; x.len()]),
    }
}

/// As [`project_pac`], additionally keeping every scheduled user's SINR at
/// or above `gamma_min` (linear).
pub fn project_pac_availability(x: &[f64], v: &CMat, frame: &Frame, gamma_min: f64) -> Result<Vec<f64>> {
    if !(gamma_min > 0.0) {
        return project_pac(x, v, &frame.p_ant);
    }
    if x.len() != v.ncols() || v.ncols() != frame.n_groups() || v.nrows() != frame.n_antennas() {
        return Err(Error::Dimension("projection inputs disagree".into()));
    }
    let a = gains(&frame.h, v);
    let meets = |p: &[f64]| {
        let s = sinr_from_gains(&a, p, frame);
        frame.partition.groups().iter().flatten().all(|&i| s[i] >= gamma_min)
    };
    if pac_feasible(v, x, &frame.p_ant) && meets(x) {
        return Ok(x.to_vec());
    }
    let g = x.len();
    let mut qp = base_problem(x, v, &frame.p_ant);
    let gm = gamma_min * (1.0 + AVAILABILITY_MARGIN);
    for (k, grp) in frame.partition.groups().iter().enumerate() {
        for &i in grp {
            let row: Vec<f64> = (0..g)
                .map(|l| if l == k { a[(i, l)] } else { -gm * a[(i, l)] })
                .collect();
            qp.constraints.geq(&row, gm * frame.noise[i]);
        }
    }
    let sol = solve_qp(&qp, 1e-9)?;
    if sol.status == Status::Optimal || sol.status == Status::MaxIterations {
        let p = clean(v, sol.x.iter().copied().collect(), &frame.p_ant);
        if meets(&p) {
            return Ok(p);
        }
    }
    // Near the edge of the set the margin can make the QP infeasible; the
    // least powers meeting the targets are then the only candidates left.
    let targets: Vec<f64> = (0..frame.h.nrows()).map(|_| gamma_min).collect();
    if let Some(p) = min_powers(v, frame, &targets) {
        if pac_feasible(v, &p, &frame.p_ant) && meets(&p) {
            return Ok(p);
        }
    }
    Err(Error::Infeasible)
}
