//! Dense LP / convex QP solver.
//!
//! Problems are brought into the inequality form
//!
//! ```text
//! minimize    ½ xᵀPx + cᵀx
//! subject to  Gx + s = h,  s ≥ 0
//!             Ax = b
//! ```
//!
//! with `x` free; finite variable bounds become rows of `G`. The iteration is
//! the orthant specialization of the Mehrotra predictor-corrector scheme, with
//! the reduced KKT system solved by a regularized LU factorization plus
//! iterative refinement.

use nalgebra::{DMatrix, DVector};

use crate::kkt;
use crate::{ConicError, KktResiduals, SolverOptions, Status};

/// Linear constraints `g·x ≤ h`, `a·x = b` and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraints {
    n: usize,
    pub(crate) ineq_rows: Vec<Vec<f64>>,
    pub(crate) ineq_rhs: Vec<f64>,
    pub(crate) eq_rows: Vec<Vec<f64>>,
    pub(crate) eq_rhs: Vec<f64>,
    pub(crate) lower: Vec<f64>,
    pub(crate) upper: Vec<f64>,
}

impl LinearConstraints {
    /// No constraints on `n` free variables.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn n_ineq(&self) -> usize {
        self.ineq_rows.len()
    }

    pub fn n_eq(&self) -> usize {
        self.eq_rows.len()
    }

    /// `row · x ≤ rhs`
    pub fn leq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.ineq_rows.push(row.to_vec());
        self.ineq_rhs.push(rhs);
        self
    }

    /// `row · x ≥ rhs`, stored as `-row · x ≤ -rhs`.
    pub fn geq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.ineq_rows.push(row.iter().map(|v| -v).collect());
        self.ineq_rhs.push(-rhs);
        self
    }

    /// `row · x = rhs`
    pub fn equal(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.eq_rows.push(row.to_vec());
        self.eq_rhs.push(rhs);
        self
    }

    /// Sets `lo ≤ x[i] ≤ hi`; infinite values mean no bound.
    pub fn bound(&mut self, i: usize, lo: f64, hi: f64) -> &mut Self {
        self.lower[i] = lo;
        self.upper[i] = hi;
        self
    }

    /// Sets `x ≥ 0` for every variable, keeping upper bounds.
    pub fn nonnegative(&mut self) -> &mut Self {
        self.lower.iter_mut().for_each(|l| *l = 0.0);
        self
    }

    pub fn ineq_row(&self, i: usize) -> (&[f64], f64) {
        (&self.ineq_rows[i], self.ineq_rhs[i])
    }

    pub fn eq_row(&self, i: usize) -> (&[f64], f64) {
        (&self.eq_rows[i], self.eq_rhs[i])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn validate(&self) -> Result<(), ConicError> {
        for (i, row) in self.ineq_rows.iter().chain(&self.eq_rows).enumerate() {
            if row.len() != self.n {
                return Err(ConicError::Dimension(format!(
                    "constraint row {i} has {} entries, expected {}",
                    row.len(),
                    self.n
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(ConicError::NonFinite("constraint rows"));
            }
        }
        if self.ineq_rhs.iter().chain(&self.eq_rhs).any(|v| !v.is_finite()) {
            return Err(ConicError::NonFinite("constraint right-hand sides"));
        }
        if self.lower.iter().chain(&self.upper).any(|v| v.is_nan()) {
            return Err(ConicError::NonFinite("bounds"));
        }
        Ok(())
    }

    /// Stacks user rows, then finite lower bounds, then finite upper bounds.
    fn inequality_form(&self) -> (DMatrix<f64>, DVector<f64>, Vec<RowOrigin>) {
        let n = self.n;
        let mut rows: Vec<(Vec<f64>, f64, RowOrigin)> = self
            .ineq_rows
            .iter()
            .zip(&self.ineq_rhs)
            .enumerate()
            .map(|(i, (r, h))| (r.clone(), *h, RowOrigin::User(i)))
            .collect();
        for (i, &lo) in self.lower.iter().enumerate() {
            if lo.is_finite() {
                let mut r = vec![0.0; n];
                r[i] = -1.0;
                rows.push((r, -lo, RowOrigin::Lower(i)));
            }
        }
        for (i, &hi) in self.upper.iter().enumerate() {
            if hi.is_finite() {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                rows.push((r, hi, RowOrigin::Upper(i)));
            }
        }
        let m = rows.len();
        let g = DMatrix::from_fn(m, n, |i, j| rows[i].0[j]);
        let h = DVector::from_iterator(m, rows.iter().map(|r| r.1));
        (g, h, rows.into_iter().map(|r| r.2).collect())
    }

    fn equality_form(&self) -> (DMatrix<f64>, DVector<f64>) {
        let p = self.eq_rows.len();
        let a = DMatrix::from_fn(p, self.n, |i, j| self.eq_rows[i][j]);
        (a, DVector::from_column_slice(&self.eq_rhs))
    }
}

#[derive(Debug, Clone, Copy)]
enum RowOrigin {
    User(usize),
    Lower(usize),
    Upper(usize),
}

/// `minimize cᵀx` subject to linear constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub cost: DVector<f64>,
    pub constraints: LinearConstraints,
}

impl LpProblem {
    pub fn new(cost: DVector<f64>) -> Self {
        let n = cost.len();
        Self {
            cost,
            constraints: LinearConstraints::new(n),
        }
    }
}

/// `minimize ½xᵀPx + cᵀx` subject to linear constraints, `P` symmetric PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub quad: DMatrix<f64>,
    pub cost: DVector<f64>,
    pub constraints: LinearConstraints,
}

impl QpProblem {
    pub fn new(quad: DMatrix<f64>, cost: DVector<f64>) -> Self {
        let n = cost.len();
        Self {
            quad,
            cost,
            constraints: LinearConstraints::new(n),
        }
    }

    /// `minimize ‖x − target‖²`, the Euclidean projection objective.
    pub fn projection(target: &DVector<f64>) -> Self {
        let n = target.len();
        Self::new(DMatrix::identity(n, n) * 2.0, target * -2.0)
    }

    /// Objective value at `x`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.quad * x)) + self.cost.dot(x)
    }
}

/// Primal-dual point returned by [`solve_lp`] and [`solve_qp`].
///
/// Duals follow the Lagrangian
/// `L = f(x) + yᵀ(Ax − b) + zᵀ(Gx − h) + z_loᵀ(lo − x) + z_upᵀ(x − up)`,
/// so all inequality multipliers are nonnegative at optimality.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub x: DVector<f64>,
    pub eq_duals: DVector<f64>,
    pub ineq_duals: DVector<f64>,
    pub lower_duals: DVector<f64>,
    pub upper_duals: DVector<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub status: Status,
    pub iterations: usize,
    pub kkt: KktResiduals,
}

pub fn solve_lp(problem: &LpProblem, tol: f64) -> Result<ConicSolution, ConicError> {
    let n = problem.cost.len();
    let qp = QpProblem {
        quad: DMatrix::zeros(n, n),
        cost: problem.cost.clone(),
        constraints: problem.constraints.clone(),
    };
    solve_inner(&qp, SolverOptions::with_tol(tol), false)
}

pub fn solve_qp(problem: &QpProblem, tol: f64) -> Result<ConicSolution, ConicError> {
    solve_inner(problem, SolverOptions::with_tol(tol), true)
}

/// Same as [`solve_qp`] with explicit iteration controls.
pub fn solve_qp_with(problem: &QpProblem, opts: SolverOptions) -> Result<ConicSolution, ConicError> {
    solve_inner(problem, opts, true)
}

fn validate(problem: &QpProblem, check_psd: bool, tol: f64) -> Result<(), ConicError> {
    if !(tol > 0.0) {
        return Err(ConicError::BadTolerance(tol));
    }
    let n = problem.cost.len();
    if problem.constraints.n_vars() != n {
        return Err(ConicError::Dimension(format!(
            "constraints declare {} variables, cost has {n}",
            problem.constraints.n_vars()
        )));
    }
    if problem.quad.nrows() != n || problem.quad.ncols() != n {
        return Err(ConicError::Dimension(format!(
            "quadratic term is {}x{}, expected {n}x{n}",
            problem.quad.nrows(),
            problem.quad.ncols()
        )));
    }
    if problem.cost.iter().any(|v| !v.is_finite()) {
        return Err(ConicError::NonFinite("cost"));
    }
    if problem.quad.iter().any(|v| !v.is_finite()) {
        return Err(ConicError::NonFinite("quadratic term"));
    }
    problem.constraints.validate()?;
    if check_psd && n > 0 {
        let scale = problem.quad.amax().max(1.0);
        let asym = (&problem.quad - problem.quad.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(ConicError::NotPsd);
        }
        let sym = (&problem.quad + problem.quad.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        if min_eig < -1e-9 * scale {
            return Err(ConicError::NotPsd);
        }
    }
    Ok(())
}

struct Kkt {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    exact: DMatrix<f64>,
    n: usize,
}

impl Kkt {
    /// Factors `[[H, Aᵀ], [A, 0]]` with `H = P + Gᵀ diag(d) G`.
    fn factor(p: &DMatrix<f64>, g: &DMatrix<f64>, a: &DMatrix<f64>, d: &DVector<f64>) -> Self {
        let n = p.nrows();
        let neq = a.nrows();
        let mut scaled_g = g.clone();
        for (i, mut row) in scaled_g.row_iter_mut().enumerate() {
            row *= d[i];
        }
        let hess = p + g.transpose() * scaled_g;
        let mut exact = DMatrix::zeros(n + neq, n + neq);
        exact.view_mut((0, 0), (n, n)).copy_from(&hess);
        exact.view_mut((n, 0), (neq, n)).copy_from(a);
        exact.view_mut((0, n), (n, neq)).copy_from(&a.transpose());
        let mut regularized = exact.clone();
        for i in 0..n {
            regularized[(i, i)] += 1e-11 * (1.0 + hess[(i, i)].abs());
        }
        for i in n..n + neq {
            regularized[(i, i)] -= 1e-11;
        }
        Self {
            lu: regularized.lu(),
            exact,
            n,
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut sol = self
            .lu
            .solve(rhs)
            .unwrap_or_else(|| DVector::zeros(rhs.len()));
        for _ in 0..3 {
            let resid = rhs - &self.exact * &sol;
            if let Some(corr) = self.lu.solve(&resid) {
                sol += corr;
            }
        }
        sol
    }

    fn reduced(
        &self,
        g: &DMatrix<f64>,
        d: &DVector<f64>,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let n = self.n;
        let dbz = bz.component_mul(d);
        let top = bx + g.transpose() * &dbz;
        let mut rhs = DVector::zeros(n + by.len());
        rhs.rows_mut(0, n).copy_from(&top);
        rhs.rows_mut(n, by.len()).copy_from(by);
        let sol = self.solve(&rhs);
        let dx = sol.rows(0, n).into_owned();
        let dy = sol.rows(n, by.len()).into_owned();
        let dz = (g * &dx - bz).component_mul(d);
        (dx, dy, dz)
    }

    /// Solves `P dx + Aᵀdy + Gᵀdz = bx`, `A dx = by`, `G dx − D⁻¹ dz = bz`.
    ///
    /// The reduced system loses accuracy once `D` spans many orders of
    /// magnitude, so the result is refined against the full system.
    #[allow(clippy::too_many_arguments)]
    fn newton(
        &self,
        p: &DMatrix<f64>,
        a: &DMatrix<f64>,
        g: &DMatrix<f64>,
        d: &DVector<f64>,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let (mut dx, mut dy, mut dz) = self.reduced(g, d, bx, by, bz);
        for _ in 0..2 {
            let rx = bx - p * &dx - a.transpose() * &dy - g.transpose() * &dz;
            let ry = by - a * &dx;
            let rz = bz - g * &dx + dz.component_div(d);
            if !(rx.iter().chain(ry.iter()).chain(rz.iter()).all(|v| v.is_finite())) {
                break;
            }
            let (cx, cy, cz) = self.reduced(g, d, &rx, &ry, &rz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
        (dx, dy, dz)
    }
}

fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

fn solve_inner(
    problem: &QpProblem,
    opts: SolverOptions,
    check_psd: bool,
) -> Result<ConicSolution, ConicError> {
    validate(problem, check_psd, opts.tol)?;
    let n = problem.cost.len();
    let p = &problem.quad;
    let c = &problem.cost;
    let (g, h, origins) = problem.constraints.inequality_form();
    let (a, b) = problem.constraints.equality_form();
    let m = g.nrows();

    let finish = |x: DVector<f64>, y: DVector<f64>, z: DVector<f64>, status: Status, iters: usize| {
        let mut ineq_duals = DVector::zeros(problem.constraints.n_ineq());
        let mut lower_duals = DVector::zeros(n);
        let mut upper_duals = DVector::zeros(n);
        for (k, origin) in origins.iter().enumerate() {
            match *origin {
                RowOrigin::User(i) => ineq_duals[i] = z[k],
                RowOrigin::Lower(i) => lower_duals[i] = z[k],
                RowOrigin::Upper(i) => upper_duals[i] = z[k],
            }
        }
        let objective = 0.5 * x.dot(&(p * &x)) + c.dot(&x);
        let dual_objective = -0.5 * x.dot(&(p * &x)) - b.dot(&y) - h.dot(&z);
        let mut sol = ConicSolution {
            x,
            eq_duals: y,
            ineq_duals,
            lower_duals,
            upper_duals,
            objective,
            dual_objective,
            status,
            iterations: iters,
            kkt: KktResiduals::default(),
        };
        sol.kkt = kkt::qp_residuals(problem, &sol);
        sol
    };

    if m == 0 {
        // Equality-constrained quadratic: one Newton step is exact.
        let kkt = Kkt::factor(p, &g, &a, &DVector::zeros(0));
        let (x, y, _) = kkt.newton(p, &a, &g, &DVector::zeros(0), &-c, &b, &DVector::zeros(0));
        let sol = finish(x, y, DVector::zeros(0), Status::Optimal, 1);
        let status = if sol.kkt.within(opts.tol) {
            Status::Optimal
        } else if sol.kkt.primal >= opts.tol {
            Status::Infeasible
        } else {
            Status::Unbounded
        };
        return Ok(ConicSolution { status, ..sol });
    }

    // Initial point: solve the KKT system with unit scaling, then shift the
    // slack and multiplier into the interior.
    let ones = DVector::from_element(m, 1.0);
    let kkt0 = Kkt::factor(p, &g, &a, &ones);
    let (mut x, mut y, mut z) = kkt0.newton(p, &a, &g, &ones, &-c, &b, &h);
    let mut s = -&z;
    let shift = |v: &mut DVector<f64>| {
        let t = -v.min();
        if t >= -1e-8 * v.norm().max(1.0) {
            v.add_scalar_mut(1.0 + t);
        }
    };
    shift(&mut s);
    shift(&mut z);

    let b_scale = 1.0 + b.amax().max(h.amax());
    let c_scale = 1.0 + c.amax();
    let mut status = Status::MaxIterations;
    let mut iters = 0;
    let mut best: Option<ConicSolution> = None;
    let mut stalled = 0;

    for it in 0..opts.max_iter {
        iters = it + 1;
        let px = p * &x;
        let r_x = &px + c + a.transpose() * &y + g.transpose() * &z;
        let r_y = &a * &x - &b;
        let r_z = &g * &x + &s - &h;
        let gap = s.dot(&z);
        let mu = gap / m as f64;
        let pobj = 0.5 * x.dot(&px) + c.dot(&x);

        let pres = r_y.amax().max(r_z.amax()) / b_scale;
        let dres = r_x.amax() / c_scale;
        let rgap = gap / (1.0 + pobj.abs());
        if pres < opts.tol && dres < opts.tol && rgap < opts.tol {
            let candidate = finish(x.clone(), y.clone(), z.clone(), Status::Optimal, iters);
            if pres < 0.1 * opts.tol
                && dres < 0.1 * opts.tol
                && rgap < 0.1 * opts.tol
                && candidate.kkt.within(opts.tol)
            {
                return Ok(candidate);
            }
            // Near the optimum the reduced system gets badly conditioned and
            // residuals can stop improving; keep the best point seen.
            match &best {
                Some(b) if b.kkt.max() <= 0.5 * candidate.kkt.max() => stalled += 1,
                _ => {
                    if best.as_ref().is_none_or(|b| candidate.kkt.max() < b.kkt.max()) {
                        best = Some(candidate);
                    }
                    stalled = 0;
                }
            }
            if stalled >= 5 {
                break;
            }
        }

        // Infeasibility certificates.
        let hz_by = h.dot(&z) + b.dot(&y);
        if pres > opts.tol && hz_by < 0.0 {
            let ray = (a.transpose() * &y + g.transpose() * &z).amax();
            if ray / -hz_by < opts.tol {
                status = Status::Infeasible;
                break;
            }
        }
        let cx = c.dot(&x);
        if dres > opts.tol && cx < 0.0 {
            let ray = px.amax().max((&a * &x).amax()).max((&g * &x).map(|v| v.max(0.0)).amax());
            if ray / -cx < opts.tol {
                status = Status::Unbounded;
                break;
            }
        }

        let d = z.component_div(&s);
        let kkt = Kkt::factor(p, &g, &a, &d);
        let neg_rx = -&r_x;
        let neg_ry = -&r_y;

        // Predictor.
        let dc_aff = -s.component_mul(&z);
        let bz_aff = -&r_z - dc_aff.component_div(&z);
        let (dx_a, _, dz_a) = kkt.newton(p, &a, &g, &d, &neg_rx, &neg_ry, &bz_aff);
        let ds_a = -&r_z - &g * &dx_a;
        let alpha_a = max_step(&s, &ds_a).min(max_step(&z, &dz_a)).min(1.0);
        let mu_aff = (&s + &ds_a * alpha_a).dot(&(&z + &dz_a * alpha_a)) / m as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let dc = (-s.component_mul(&z) - ds_a.component_mul(&dz_a)).add_scalar(sigma * mu);
        let bz = -&r_z - dc.component_div(&z);
        let (dx, dy, dz) = kkt.newton(p, &a, &g, &d, &neg_rx, &neg_ry, &bz);
        let ds = -&r_z - &g * &dx;
        let alpha = (0.99 * max_step(&s, &ds).min(max_step(&z, &dz))).min(1.0);

        let finite = |v: &DVector<f64>| v.iter().all(|e| e.is_finite());
        if !(alpha > 1e-14 && finite(&dx) && finite(&dy) && finite(&dz) && finite(&ds)) {
            // Stalled near the boundary; the current iterate is the best we have.
            break;
        }
        x += &dx * alpha;
        y += &dy * alpha;
        z += &dz * alpha;
        s += &ds * alpha;
    }

    let mut sol = finish(x, y, z, status, iters);
    if status == Status::MaxIterations {
        if let Some(b) = best.filter(|b| b.kkt.max() < sol.kkt.max()) {
            sol = ConicSolution { iterations: iters, ..b };
        }
    }
    if status == Status::MaxIterations && sol.kkt.within(opts.tol) {
        return Ok(ConicSolution {
            status: Status::Optimal,
            ..sol
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn lp_vertex_by_inspection() {
        let mut lp = LpProblem::new(dv(&[-1.0, -2.0]));
        lp.constraints.leq(&[1.0, 1.0], 1.0).nonnegative();
        let sol = solve_lp(&lp, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-8);
        assert!(sol.x[0].abs() < 1e-7 && (sol.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lp_empty_set_is_infeasible() {
        let mut lp = LpProblem::new(dv(&[1.0]));
        lp.constraints.geq(&[1.0], 3.0).leq(&[1.0], 2.0);
        let sol = solve_lp(&lp, 1e-7).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn lp_unbounded_direction() {
        let mut lp = LpProblem::new(dv(&[-1.0, 0.0]));
        lp.constraints.nonnegative().leq(&[0.0, 1.0], 1.0);
        let sol = solve_lp(&lp, 1e-7).unwrap();
        assert_eq!(sol.status, Status::Unbounded);
    }

    #[test]
    fn qp_clamped_scalar() {
        // (x − 2)² = x² − 4x + 4
        let mut qp = QpProblem::new(DMatrix::from_element(1, 1, 2.0), dv(&[-4.0]));
        qp.constraints.bound(0, 0.0, 1.0);
        let sol = solve_qp(&qp, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qp_unconstrained_projection_is_identity() {
        let target = dv(&[0.3, -1.5, 2.0]);
        let sol = solve_qp(&QpProblem::projection(&target), 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x - target).amax() < 1e-12);
    }

    #[test]
    fn qp_with_equality() {
        // min x² + y² s.t. x + y = 1 → (½, ½)
        let mut qp = QpProblem::new(DMatrix::identity(2, 2) * 2.0, dv(&[0.0, 0.0]));
        qp.constraints.equal(&[1.0, 1.0], 1.0).nonnegative();
        let sol = solve_qp(&qp, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x[0] - 0.5).abs() < 1e-8 && (sol.x[1] - 0.5).abs() < 1e-8);
        assert!((sol.eq_duals[0] + 1.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_indefinite_quadratic() {
        let qp = QpProblem::new(DMatrix::from_diagonal(&dv(&[1.0, -1.0])), dv(&[0.0, 0.0]));
        assert_eq!(solve_qp(&qp, 1e-7), Err(ConicError::NotPsd));
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut lp = LpProblem::new(dv(&[1.0, 1.0]));
        lp.constraints.leq(&[1.0], 1.0);
        assert!(matches!(solve_lp(&lp, 1e-7), Err(ConicError::Dimension(_))));
    }
}
