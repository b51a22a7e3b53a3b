//! Independent optimality checks.
//!
//! These functions recompute residuals from the problem data and a returned
//! point, without touching solver internals. All residuals are relative:
//! infinity norms divided by `1 + ` the size of the matching data.

use nalgebra::{DMatrix, DVector};

use crate::qp::{ConicSolution, LpProblem, QpProblem};
use crate::sdp::{Sense, SdpProblem, SdpSolution};
use crate::KktResiduals;

pub fn lp_residuals(problem: &LpProblem, sol: &ConicSolution) -> KktResiduals {
    linear_residuals(None, &problem.cost, &problem.constraints, sol)
}

pub fn qp_residuals(problem: &QpProblem, sol: &ConicSolution) -> KktResiduals {
    linear_residuals(Some(&problem.quad), &problem.cost, &problem.constraints, sol)
}

fn dot(a: &[f64], x: &DVector<f64>) -> f64 {
    a.iter().zip(x.iter()).map(|(u, v)| u * v).sum()
}

fn linear_residuals(
    quad: Option<&DMatrix<f64>>,
    cost: &DVector<f64>,
    cons: &crate::LinearConstraints,
    sol: &ConicSolution,
) -> KktResiduals {
    let x = &sol.x;
    let n = x.len();
    let mut b_scale: f64 = 1.0;
    let mut primal: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let mut grad = match quad {
        Some(p) => p * x + cost,
        None => cost.clone(),
    };
    let mut neg_dual: f64 = 0.0;

    for i in 0..cons.n_eq() {
        let (row, rhs) = cons.eq_row(i);
        b_scale = b_scale.max(1.0 + rhs.abs());
        primal = primal.max((dot(row, x) - rhs).abs());
        for (j, a) in row.iter().enumerate() {
            grad[j] += a * sol.eq_duals[i];
        }
    }
    for i in 0..cons.n_ineq() {
        let (row, rhs) = cons.ineq_row(i);
        b_scale = b_scale.max(1.0 + rhs.abs());
        let slack = rhs - dot(row, x);
        let z = sol.ineq_duals[i];
        primal = primal.max(-slack);
        neg_dual = neg_dual.max(-z);
        comp = comp.max((z * slack).abs());
        for (j, a) in row.iter().enumerate() {
            grad[j] += a * z;
        }
    }
    for j in 0..n {
        let lo = cons.lower()[j];
        if lo.is_finite() {
            b_scale = b_scale.max(1.0 + lo.abs());
            let z = sol.lower_duals[j];
            primal = primal.max(lo - x[j]);
            neg_dual = neg_dual.max(-z);
            comp = comp.max((z * (x[j] - lo)).abs());
            grad[j] -= z;
        }
        let hi = cons.upper()[j];
        if hi.is_finite() {
            b_scale = b_scale.max(1.0 + hi.abs());
            let z = sol.upper_duals[j];
            primal = primal.max(x[j] - hi);
            neg_dual = neg_dual.max(-z);
            comp = comp.max((z * (hi - x[j])).abs());
            grad[j] += z;
        }
    }
    let objective = match quad {
        Some(p) => 0.5 * x.dot(&(p * x)) + cost.dot(x),
        None => cost.dot(x),
    };
    let c_scale = 1.0 + cost.amax();
    KktResiduals {
        primal: primal.max(0.0) / b_scale,
        dual: (grad.amax().max(neg_dual)) / c_scale,
        complementarity: comp / (1.0 + objective.abs()),
    }
}

/// Checks an SDP point in the dual `max bᵀy`, `Z = C − Σ y_i A_i ⪰ 0`.
///
/// The dual slack is recomputed from `y`; the solver's own `Z` is ignored.
pub fn sdp_residuals(problem: &SdpProblem, sol: &SdpSolution) -> KktResiduals {
    let nb = problem.kinds.len();
    let mut b_scale: f64 = 1.0;
    let mut primal: f64 = 0.0;
    let mut neg_dual: f64 = 0.0;
    let mut zs: Vec<DMatrix<f64>> = problem.block_cost.clone();
    let mut reduced: Vec<f64> = problem.scalar_cost.clone();

    for (i, row) in problem.rows.iter().enumerate() {
        let y = sol.duals[i];
        let mut lhs = 0.0;
        for (b, a) in &row.blocks {
            lhs += a.dot(&sol.blocks[*b]);
            zs[*b] -= a * y;
        }
        for (s, v) in &row.scalars {
            lhs += v * sol.scalars[*s];
            reduced[*s] -= v * y;
        }
        b_scale = b_scale.max(1.0 + row.rhs.abs());
        let viol = match row.sense {
            Sense::Eq => (lhs - row.rhs).abs(),
            Sense::Leq => {
                neg_dual = neg_dual.max(y);
                lhs - row.rhs
            }
            Sense::Geq => {
                neg_dual = neg_dual.max(-y);
                row.rhs - lhs
            }
        };
        primal = primal.max(viol);
    }
    for b in 0..nb {
        let x = &sol.blocks[b];
        if x.nrows() > 0 {
            let sym = (x + x.transpose()) * 0.5;
            primal = primal.max(-sym.symmetric_eigenvalues().min());
            let z = (&zs[b] + zs[b].transpose()) * 0.5;
            neg_dual = neg_dual.max(-z.symmetric_eigenvalues().min());
        }
    }
    for (s, r) in reduced.iter().enumerate() {
        primal = primal.max(-sol.scalars[s]);
        neg_dual = neg_dual.max(-r);
    }
    let c_scale = 1.0
        + problem
            .block_cost
            .iter()
            .map(|c| c.amax())
            .chain(problem.scalar_cost.iter().map(|c| c.abs()))
            .fold(0.0, f64::max);

    let pobj = sol.objective;
    let dobj: f64 = problem
        .rows
        .iter()
        .zip(sol.duals.iter())
        .map(|(r, y)| r.rhs * y)
        .sum();
    KktResiduals {
        primal: primal.max(0.0) / b_scale,
        dual: neg_dual.max(0.0) / c_scale,
        complementarity: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
    }
}
