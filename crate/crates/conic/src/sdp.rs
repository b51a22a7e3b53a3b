//! Dense SDP solver (HKM direction, Mehrotra predictor-corrector).
//!
//! Internally every problem is in the standard primal form
//!
//! ```text
//! minimize    Σ_b ⟨C_b, X_b⟩ + cᵀx
//! subject to  Σ_b ⟨A_ib, X_b⟩ + a_iᵀx = b_i,   X_b ⪰ 0, x ≥ 0
//! ```
//!
//! Inequality rows get a nonnegative slack appended to `x`. The Newton
//! system is reduced to the `m × m` Schur complement
//! `M_ij = Σ_b tr(A_ib X_b A_jb Z_b⁻¹) + Σ_l a_il a_jl x_l / z_l`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::hermitian;
use crate::kkt;
use crate::{ConicError, KktResiduals, SolverOptions, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Symmetric(usize),
    /// Complex Hermitian `n × n`, solved as a real `2n × 2n` block.
    Hermitian(usize),
}

impl BlockKind {
    /// Size of the real block handled by the solver.
    pub fn real_dim(self) -> usize {
        match self {
            BlockKind::Symmetric(n) => n,
            BlockKind::Hermitian(n) => 2 * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub usize);

/// A nonnegative scalar variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Leq,
    Geq,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LowRank {
    pub(crate) f: DMatrix<f64>,
    pub(crate) coefs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub(crate) blocks: Vec<(usize, DMatrix<f64>)>,
    /// Optional factorization `A = F diag(c) Fᵀ` of each entry of `blocks`.
    pub(crate) factors: Vec<Option<LowRank>>,
    pub(crate) scalars: Vec<(usize, f64)>,
    pub(crate) sense: Sense,
    pub(crate) rhs: f64,
}

/// Linear objective over PSD blocks and nonnegative scalars with trace
/// constraints. Data for Hermitian blocks is stored already embedded and
/// halved, so every inner product below is a plain real trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SdpProblem {
    pub(crate) kinds: Vec<BlockKind>,
    pub(crate) block_cost: Vec<DMatrix<f64>>,
    pub(crate) scalar_cost: Vec<f64>,
    pub(crate) rows: Vec<Row>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_symmetric_block(&mut self, n: usize) -> BlockId {
        self.push_block(BlockKind::Symmetric(n))
    }

    pub fn add_hermitian_block(&mut self, n: usize) -> BlockId {
        self.push_block(BlockKind::Hermitian(n))
    }

    fn push_block(&mut self, kind: BlockKind) -> BlockId {
        let d = kind.real_dim();
        self.kinds.push(kind);
        self.block_cost.push(DMatrix::zeros(d, d));
        BlockId(self.kinds.len() - 1)
    }

    pub fn add_scalar(&mut self) -> ScalarId {
        self.scalar_cost.push(0.0);
        ScalarId(self.scalar_cost.len() - 1)
    }

    pub fn n_blocks(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_scalars(&self) -> usize {
        self.scalar_cost.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn kind(&self, b: BlockId) -> BlockKind {
        self.kinds[b.0]
    }

    pub fn set_symmetric_cost(&mut self, b: BlockId, c: DMatrix<f64>) {
        self.block_cost[b.0] = c;
    }

    pub fn set_hermitian_cost(&mut self, b: BlockId, c: &DMatrix<Complex64>) {
        self.block_cost[b.0] = hermitian::embed(c) * 0.5;
    }

    pub fn set_scalar_cost(&mut self, s: ScalarId, c: f64) {
        self.scalar_cost[s.0] = c;
    }

    /// Opens a new constraint row and returns its index.
    pub fn add_constraint(&mut self, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row {
            blocks: Vec::new(),
            factors: Vec::new(),
            scalars: Vec::new(),
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn add_symmetric_term(&mut self, row: usize, b: BlockId, a: DMatrix<f64>) {
        self.rows[row].blocks.push((b.0, a));
        self.rows[row].factors.push(None);
    }

    /// Adds `⟨F diag(c) Fᵀ, X_b⟩`. The factored form makes the Schur
    /// complement much cheaper when `F` has few columns.
    pub fn add_symmetric_low_rank_term(&mut self, row: usize, b: BlockId, f: DMatrix<f64>, coefs: &[f64]) {
        let mut scaled = f.clone();
        for (j, c) in coefs.iter().enumerate().take(f.ncols()) {
            scaled.column_mut(j).scale_mut(*c);
        }
        let a = if coefs.len() == f.ncols() {
            &scaled * f.transpose()
        } else {
            // Rejected by validation.
            DMatrix::from_element(f.nrows(), f.nrows(), f64::NAN)
        };
        self.rows[row].blocks.push((b.0, a));
        self.rows[row].factors.push(Some(LowRank {
            f,
            coefs: coefs.to_vec(),
        }));
    }

    /// Adds `Re tr(A X_b)` for a Hermitian `A`.
    pub fn add_hermitian_term(&mut self, row: usize, b: BlockId, a: &DMatrix<Complex64>) {
        self.rows[row].blocks.push((b.0, hermitian::embed(a) * 0.5));
        self.rows[row].factors.push(None);
    }

    /// Adds `c · u† X_b u` for a Hermitian block `b`, stored in factored form.
    pub fn add_hermitian_rank_one_term(&mut self, row: usize, b: BlockId, u: &DVector<Complex64>, c: f64) {
        let n = u.len();
        // emb(uu†) = ppᵀ + qqᵀ with p = [Re u; Im u], q = [-Im u; Re u].
        let f = DMatrix::from_fn(2 * n, 2, |i, j| match (j, i < n) {
            (0, true) => u[i].re,
            (0, false) => u[i - n].im,
            (_, true) => -u[i].im,
            (_, false) => u[i - n].re,
        });
        self.add_symmetric_low_rank_term(row, b, f, &[0.5 * c, 0.5 * c]);
    }

    pub fn add_scalar_term(&mut self, row: usize, s: ScalarId, coef: f64) {
        self.rows[row].scalars.push((s.0, coef));
    }

    pub(crate) fn validate(&self) -> Result<(), ConicError> {
        for (k, c) in self.block_cost.iter().enumerate() {
            let d = self.kinds[k].real_dim();
            if c.nrows() != d || c.ncols() != d {
                return Err(ConicError::Dimension(format!("cost of block {k} is not {d}x{d}")));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(ConicError::NonFinite("block cost"));
            }
        }
        if self.scalar_cost.iter().any(|v| !v.is_finite()) {
            return Err(ConicError::NonFinite("scalar cost"));
        }
        for row in &self.rows {
            if !row.rhs.is_finite() {
                return Err(ConicError::NonFinite("constraint right-hand side"));
            }
            for lr in row.factors.iter().flatten() {
                if lr.coefs.len() != lr.f.ncols() {
                    return Err(ConicError::Dimension("low-rank factor and coefficients differ".into()));
                }
            }
            for (b, a) in &row.blocks {
                let kind = self.kinds.get(*b).ok_or(ConicError::UnknownVariable(*b))?;
                let d = kind.real_dim();
                if a.nrows() != d || a.ncols() != d {
                    return Err(ConicError::Dimension(format!("term on block {b} is not {d}x{d}")));
                }
                if a.iter().any(|v| !v.is_finite()) {
                    return Err(ConicError::NonFinite("constraint matrix"));
                }
            }
            for (s, v) in &row.scalars {
                if *s >= self.scalar_cost.len() {
                    return Err(ConicError::UnknownVariable(*s));
                }
                if !v.is_finite() {
                    return Err(ConicError::NonFinite("constraint coefficient"));
                }
            }
        }
        Ok(())
    }
}

/// Result of [`solve_sdp`].
#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// Real primal blocks as seen by the solver (embedded for Hermitian).
    pub blocks: Vec<DMatrix<f64>>,
    pub scalars: DVector<f64>,
    /// One multiplier per constraint row, in the dual `max bᵀy`,
    /// `C − Σ y_i A_i ⪰ 0`; `≤` rows have `y_i ≤ 0`, `≥` rows `y_i ≥ 0`.
    pub duals: DVector<f64>,
    pub dual_slack: Vec<DMatrix<f64>>,
    pub objective: f64,
    pub dual_objective: f64,
    pub status: Status,
    pub iterations: usize,
    pub kkt: KktResiduals,
    kinds: Vec<BlockKind>,
}

impl SdpSolution {
    pub fn symmetric(&self, b: BlockId) -> &DMatrix<f64> {
        &self.blocks[b.0]
    }

    /// Hermitian value of block `b`; symmetric blocks are returned as real.
    pub fn hermitian(&self, b: BlockId) -> DMatrix<Complex64> {
        match self.kinds[b.0] {
            BlockKind::Hermitian(_) => hermitian::extract(&self.blocks[b.0]),
            BlockKind::Symmetric(_) => self.blocks[b.0].map(|v| Complex64::new(v, 0.0)),
        }
    }

    pub fn scalar(&self, s: ScalarId) -> f64 {
        self.scalars[s.0]
    }
}

/// Standard-form view of a problem: user scalars followed by slacks.
struct Standard<'a> {
    p: &'a SdpProblem,
    n_lin: usize,
    lin_cost: DVector<f64>,
    /// Sparse linear coefficients per row.
    lin_rows: Vec<Vec<(usize, f64)>>,
    /// For each block, the rows (and matrices) that touch it.
    by_block: Vec<Vec<(usize, &'a DMatrix<f64>)>>,
    /// Factored entries per block, as (row, factor).
    low_rank: Vec<Vec<(usize, &'a LowRank)>>,
    /// Entries of `by_block` without a factorization.
    dense: Vec<Vec<(usize, &'a DMatrix<f64>)>>,
    rhs: DVector<f64>,
}

impl<'a> Standard<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let ns = p.scalar_cost.len();
        let mut n_lin = ns;
        let mut lin_rows = Vec::with_capacity(p.rows.len());
        let mut by_block: Vec<Vec<(usize, &DMatrix<f64>)>> = vec![Vec::new(); p.kinds.len()];
        let mut low_rank: Vec<Vec<(usize, &LowRank)>> = vec![Vec::new(); p.kinds.len()];
        let mut dense: Vec<Vec<(usize, &DMatrix<f64>)>> = vec![Vec::new(); p.kinds.len()];
        for (i, row) in p.rows.iter().enumerate() {
            let mut lin = row.scalars.clone();
            match row.sense {
                Sense::Eq => {}
                Sense::Leq => {
                    lin.push((n_lin, 1.0));
                    n_lin += 1;
                }
                Sense::Geq => {
                    lin.push((n_lin, -1.0));
                    n_lin += 1;
                }
            }
            lin_rows.push(lin);
            for ((b, a), f) in row.blocks.iter().zip(&row.factors) {
                by_block[*b].push((i, a));
                match f {
                    Some(lr) => low_rank[*b].push((i, lr)),
                    None => dense[*b].push((i, a)),
                }
            }
        }
        let mut lin_cost = DVector::zeros(n_lin);
        lin_cost.rows_mut(0, ns).copy_from_slice(&p.scalar_cost);
        let rhs = DVector::from_iterator(p.rows.len(), p.rows.iter().map(|r| r.rhs));
        Self {
            p,
            n_lin,
            lin_cost,
            lin_rows,
            by_block,
            low_rank,
            dense,
            rhs,
        }
    }

    fn m(&self) -> usize {
        self.rhs.len()
    }

    fn apply(&self, xs: &[DMatrix<f64>], x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        for (b, rows) in self.by_block.iter().enumerate() {
            for (i, a) in rows {
                out[*i] += a.dot(&xs[b]);
            }
        }
        for (i, lin) in self.lin_rows.iter().enumerate() {
            for (l, v) in lin {
                out[i] += v * x[*l];
            }
        }
        out
    }

    /// Nonsymmetric inputs are allowed; only their symmetric part matters.
    fn apply_general(&self, hs: &[DMatrix<f64>], h: &DVector<f64>) -> DVector<f64> {
        self.apply(hs, h)
    }

    fn adjoint(&self, y: &DVector<f64>) -> (Vec<DMatrix<f64>>, DVector<f64>) {
        let mut blocks: Vec<DMatrix<f64>> = self
            .p
            .kinds
            .iter()
            .map(|k| DMatrix::zeros(k.real_dim(), k.real_dim()))
            .collect();
        for (b, rows) in self.by_block.iter().enumerate() {
            for (i, a) in rows {
                if y[*i] != 0.0 {
                    let c = y[*i];
                    blocks[b].zip_apply(*a, |o, v| *o += c * v);
                }
            }
        }
        let mut lin = DVector::zeros(self.n_lin);
        for (i, row) in self.lin_rows.iter().enumerate() {
            for (l, v) in row {
                lin[*l] += v * y[i];
            }
        }
        (blocks, lin)
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α ≤ ∞` keeping `X + α dX ⪰ 0`, given `L⁻¹` for `X = LLᵀ`.
fn psd_step(linv: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    if linv.nrows() == 0 {
        return f64::INFINITY;
    }
    let t = linv * dx * linv.transpose();
    let lam = sym(&t).symmetric_eigenvalues().min();
    if lam < 0.0 {
        -1.0 / lam
    } else {
        f64::INFINITY
    }
}

fn lower_inverse(chol: &Cholesky<f64, Dyn>) -> DMatrix<f64> {
    let l = chol.l();
    let mut inv = DMatrix::identity(l.nrows(), l.nrows());
    l.solve_lower_triangular_mut(&mut inv);
    inv
}

fn lin_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution, ConicError> {
    solve_sdp_with(problem, SolverOptions::with_tol(tol))
}

pub fn solve_sdp_with(problem: &SdpProblem, opts: SolverOptions) -> Result<SdpSolution, ConicError> {
    if !(opts.tol > 0.0) {
        return Err(ConicError::BadTolerance(opts.tol));
    }
    problem.validate()?;
    let st = Standard::new(problem);
    let m = st.m();
    let nb = problem.kinds.len();
    let dims: Vec<usize> = problem.kinds.iter().map(|k| k.real_dim()).collect();
    let n_lin = st.n_lin;
    let nu = (dims.iter().sum::<usize>() + n_lin) as f64;

    // Infeasible starting point scaled to the data.
    let mut xs = Vec::with_capacity(nb);
    let mut zs = Vec::with_capacity(nb);
    for b in 0..nb {
        let n = dims[b] as f64;
        let mut a_max: f64 = 0.0;
        let mut ratio: f64 = 0.0;
        for (i, a) in &st.by_block[b] {
            let an = a.norm();
            a_max = a_max.max(an);
            ratio = ratio.max((1.0 + st.rhs[*i].abs()) / (1.0 + an));
        }
        let xi = 10f64.max(n.sqrt()).max(n * ratio);
        let eta = 10f64.max(n.sqrt()).max(a_max).max(problem.block_cost[b].norm());
        xs.push(DMatrix::identity(dims[b], dims[b]) * xi);
        zs.push(DMatrix::identity(dims[b], dims[b]) * eta);
    }
    let mut lin_ratio: f64 = 1.0;
    let mut lin_a: f64 = 1.0;
    for (i, row) in st.lin_rows.iter().enumerate() {
        for (_, v) in row {
            lin_a = lin_a.max(v.abs());
            lin_ratio = lin_ratio.max((1.0 + st.rhs[i].abs()) / (1.0 + v.abs()));
        }
    }
    let mut x = DVector::from_element(n_lin, 10f64.max(lin_ratio));
    let mut z = DVector::from_element(n_lin, 10f64.max(lin_a).max(st.lin_cost.amax()));
    let mut y = DVector::zeros(m);

    let b_scale = 1.0 + st.rhs.amax();
    let c_scale = 1.0
        + problem
            .block_cost
            .iter()
            .map(|c| c.amax())
            .fold(st.lin_cost.amax(), f64::max);

    let mut status = Status::MaxIterations;
    let mut iters = 0;

    for it in 0..opts.max_iter {
        iters = it + 1;
        let (aty_b, aty_l) = st.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = (0..nb)
            .map(|b| &problem.block_cost[b] - &aty_b[b] - &zs[b])
            .collect();
        let rd_l = &st.lin_cost - &aty_l - &z;
        let rp = &st.rhs - st.apply(&xs, &x);

        let pobj: f64 = (0..nb).map(|b| problem.block_cost[b].dot(&xs[b])).sum::<f64>()
            + st.lin_cost.dot(&x);
        let dobj = st.rhs.dot(&y);
        let xz: f64 = (0..nb).map(|b| xs[b].dot(&zs[b])).sum::<f64>() + x.dot(&z);
        let mu = xz / nu;

        let pinf = rp.amax() / b_scale;
        let dinf = rd
            .iter()
            .map(|r| r.amax())
            .fold(rd_l.amax(), f64::max)
            / c_scale;
        let rgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf < 0.1 * opts.tol && dinf < 0.1 * opts.tol && rgap < 0.1 * opts.tol {
            let cand = assemble(problem, &st, &xs, &x, &y, &zs, Status::Optimal, iters);
            if cand.kkt.within(opts.tol) {
                return Ok(cand);
            }
        }

        // Certificates: a dual ray proves primal infeasibility and vice versa.
        if pinf > opts.tol && dobj > 0.0 {
            let ray = (0..nb)
                .map(|b| (&aty_b[b] + &zs[b]).amax())
                .fold((&aty_l + &z).amax(), f64::max);
            if ray / dobj < opts.tol {
                status = Status::Infeasible;
                break;
            }
        }
        if dinf > opts.tol && pobj < 0.0 {
            let ray = (&st.rhs - &rp).amax();
            if ray / -pobj < opts.tol {
                status = Status::Unbounded;
                break;
            }
        }

        // Factorizations of the current iterate.
        let mut zinv = Vec::with_capacity(nb);
        let mut xchol = Vec::with_capacity(nb);
        let mut zchol = Vec::with_capacity(nb);
        let mut broken = false;
        for b in 0..nb {
            match (Cholesky::new(xs[b].clone()), Cholesky::new(zs[b].clone())) {
                (Some(cx), Some(cz)) => {
                    zinv.push(cz.inverse());
                    xchol.push(lower_inverse(&cx));
                    zchol.push(lower_inverse(&cz));
                }
                _ => {
                    broken = true;
                    break;
                }
            }
        }
        if broken {
            break;
        }

        // Schur complement.
        let mut schur = DMatrix::zeros(m, m);
        for b in 0..nb {
            let rows = &st.by_block[b];
            let lr = &st.low_rank[b];
            let lr_rows: std::collections::HashSet<usize> = lr.iter().map(|(i, _)| *i).collect();
            for (j, aj) in &st.dense[b] {
                let t = &xs[b] * *aj * &zinv[b];
                for (i, ai) in rows {
                    let v = ai.dot(&t);
                    schur[(*i, *j)] += v;
                    if lr_rows.contains(i) {
                        schur[(*j, *i)] += v;
                    }
                }
            }
            if !lr.is_empty() {
                // tr(A_i X A_j Z⁻¹) = Σ c_a c_b (f_aᵀ X f_b)(f_bᵀ Z⁻¹ f_a).
                let k: usize = lr.iter().map(|(_, f)| f.f.ncols()).sum();
                let n = dims[b];
                let mut fall = DMatrix::zeros(n, k);
                let mut starts = Vec::with_capacity(lr.len());
                let mut c = 0;
                for (_, f) in lr {
                    starts.push(c);
                    fall.columns_mut(c, f.f.ncols()).copy_from(&f.f);
                    c += f.f.ncols();
                }
                let gx = fall.transpose() * (&xs[b] * &fall);
                let gz = fall.transpose() * (&zinv[b] * &fall);
                let had = gx.component_mul(&gz);
                for (e1, (i, f1)) in lr.iter().enumerate() {
                    for (e2, (j, f2)) in lr.iter().enumerate() {
                        let mut v = 0.0;
                        for (a, ca) in f1.coefs.iter().enumerate() {
                            for (bb, cb) in f2.coefs.iter().enumerate() {
                                v += ca * cb * had[(starts[e1] + a, starts[e2] + bb)];
                            }
                        }
                        schur[(*i, *j)] += v;
                    }
                }
            }
        }
        let ratio = x.component_div(&z);
        for (i, ri) in st.lin_rows.iter().enumerate() {
            for (j, rj) in st.lin_rows.iter().enumerate() {
                let mut acc = 0.0;
                for (li, vi) in ri {
                    for (lj, vj) in rj {
                        if li == lj {
                            acc += vi * vj * ratio[*li];
                        }
                    }
                }
                schur[(i, j)] += acc;
            }
        }
        let schur = sym(&schur);
        let reg = 1e-14 * (1.0 + schur.amax());
        let chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => match Cholesky::new(&schur + DMatrix::identity(m, m) * reg * 1e4) {
                Some(c) => c,
                None => break,
            },
        };

        // Direction for a given centering target and second-order term.
        let direction = |sigma_mu: f64,
                         corr: Option<(&[DMatrix<f64>], &DVector<f64>, &[DMatrix<f64>], &DVector<f64>)>| {
            let mut hb = Vec::with_capacity(nb);
            for b in 0..nb {
                let mut h = &zinv[b] * sigma_mu - &xs[b] - &xs[b] * &rd[b] * &zinv[b];
                if let Some((dxa, _, dza, _)) = corr {
                    h -= &dxa[b] * &dza[b] * &zinv[b];
                }
                hb.push(h);
            }
            let mut hl = DVector::from_fn(n_lin, |l, _| {
                sigma_mu / z[l] - x[l] - ratio[l] * rd_l[l]
            });
            if let Some((_, dxa_l, _, dza_l)) = corr {
                hl -= dxa_l.component_mul(dza_l).component_div(&z);
            }
            let rhs = &rp - st.apply_general(&hb, &hl);
            let dy = chol.solve(&rhs);
            let (ady_b, ady_l) = st.adjoint(&dy);
            let mut dxs = Vec::with_capacity(nb);
            let mut dzs = Vec::with_capacity(nb);
            for b in 0..nb {
                let dxb = &hb[b] + &xs[b] * &ady_b[b] * &zinv[b];
                dxs.push(sym(&dxb));
                dzs.push(&rd[b] - &ady_b[b]);
            }
            let dx = hl + ratio.component_mul(&ady_l);
            let dz = &rd_l - ady_l;
            (dxs, dx, dy, dzs, dz)
        };

        let steps = |dxs: &[DMatrix<f64>], dx: &DVector<f64>, dzs: &[DMatrix<f64>], dz: &DVector<f64>| {
            let mut ap = lin_step(&x, dx);
            let mut ad = lin_step(&z, dz);
            for b in 0..nb {
                ap = ap.min(psd_step(&xchol[b], &dxs[b]));
                ad = ad.min(psd_step(&zchol[b], &dzs[b]));
            }
            (ap, ad)
        };

        let (dxa, dxa_l, _, dza, dza_l) = direction(0.0, None);
        let (ap, ad) = steps(&dxa, &dxa_l, &dza, &dza_l);
        let (ap_a, ad_a) = (ap.min(1.0), ad.min(1.0));
        let mut xz_aff = 0.0;
        for b in 0..nb {
            xz_aff += (&xs[b] + &dxa[b] * ap_a).dot(&(&zs[b] + &dza[b] * ad_a));
        }
        xz_aff += (&x + &dxa_l * ap_a).dot(&(&z + &dza_l * ad_a));
        let sigma = (xz_aff / xz).clamp(0.0, 1.0).powi(3).max(0.0);

        let (dxs, dx, dy, dzs, dz) =
            direction(sigma * mu, Some((&dxa, &dxa_l, &dza, &dza_l)));
        let (ap, ad) = steps(&dxs, &dx, &dzs, &dz);
        let gamma = 0.9 + 0.09 * ap_a.min(ad_a);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);

        for b in 0..nb {
            xs[b] += &dxs[b] * ap;
            zs[b] += &dzs[b] * ad;
            xs[b] = sym(&xs[b]);
            zs[b] = sym(&zs[b]);
        }
        x += &dx * ap;
        y += &dy * ad;
        z += &dz * ad;

        if !y.iter().all(|v| v.is_finite()) {
            break;
        }
    }

    let sol = assemble(problem, &st, &xs, &x, &y, &zs, status, iters);
    if status == Status::MaxIterations && sol.kkt.within(opts.tol) {
        return Ok(SdpSolution {
            status: Status::Optimal,
            ..sol
        });
    }
    Ok(sol)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    problem: &SdpProblem,
    st: &Standard<'_>,
    xs: &[DMatrix<f64>],
    x: &DVector<f64>,
    y: &DVector<f64>,
    zs: &[DMatrix<f64>],
    status: Status,
    iters: usize,
) -> SdpSolution {
    let ns = problem.scalar_cost.len();
    let objective = (0..xs.len())
        .map(|b| problem.block_cost[b].dot(&xs[b]))
        .sum::<f64>()
        + problem
            .scalar_cost
            .iter()
            .zip(x.iter())
            .map(|(c, v)| c * v)
            .sum::<f64>();
    let mut sol = SdpSolution {
        blocks: xs.to_vec(),
        scalars: x.rows(0, ns).into_owned(),
        duals: y.clone(),
        dual_slack: zs.to_vec(),
        objective,
        dual_objective: st.rhs.dot(y),
        status,
        iterations: iters,
        kkt: KktResiduals::default(),
        kinds: problem.kinds.clone(),
    };
    sol.kkt = kkt::sdp_residuals(problem, &sol);
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_eigenvalue_of_diagonal_cost() {
        let mut p = SdpProblem::new();
        let b = p.add_symmetric_block(2);
        p.set_symmetric_cost(b, DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 2.0])));
        let r = p.add_constraint(Sense::Eq, 1.0);
        p.add_symmetric_term(r, b, DMatrix::identity(2, 2));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
        let x = sol.symmetric(b);
        assert!((x[(0, 0)] - 1.0).abs() < 1e-7 && x[(1, 1)].abs() < 1e-7);
    }

    #[test]
    fn constant_objective_on_feasible_set() {
        let mut p = SdpProblem::new();
        let b = p.add_symmetric_block(3);
        p.set_symmetric_cost(b, DMatrix::identity(3, 3));
        let r = p.add_constraint(Sense::Eq, 1.0);
        p.add_symmetric_term(r, b, DMatrix::identity(3, 3));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!((sol.symmetric(b).trace() - 1.0).abs() < 1e-9);
        assert!(sol.symmetric(b).symmetric_eigenvalues().min() > -1e-9);
    }

    #[test]
    fn infeasible_trace_constraints() {
        // tr(X) = 1 and tr(X) ≥ 2 cannot both hold.
        let mut p = SdpProblem::new();
        let b = p.add_symmetric_block(2);
        p.set_symmetric_cost(b, DMatrix::identity(2, 2));
        let r = p.add_constraint(Sense::Eq, 1.0);
        p.add_symmetric_term(r, b, DMatrix::identity(2, 2));
        let r = p.add_constraint(Sense::Geq, 2.0);
        p.add_symmetric_term(r, b, DMatrix::identity(2, 2));
        let sol = solve_sdp(&p, 1e-7).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn hermitian_block_min_eigenvalue() {
        // min Re tr(CX) s.t. tr X = 1 over Hermitian X ⪰ 0 → λ_min(C).
        let c = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let mut p = SdpProblem::new();
        let b = p.add_hermitian_block(2);
        p.set_hermitian_cost(b, &c);
        let r = p.add_constraint(Sense::Eq, 1.0);
        p.add_hermitian_term(r, b, &DMatrix::identity(2, 2));
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8, "{}", sol.objective);
        let x = sol.hermitian(b);
        assert!((x.trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scalar_only_problem_is_an_lp() {
        // min s s.t. s ≥ 3
        let mut p = SdpProblem::new();
        let s = p.add_scalar();
        p.set_scalar_cost(s, 1.0);
        let r = p.add_constraint(Sense::Geq, 3.0);
        p.add_scalar_term(r, s, 1.0);
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.scalar(s) - 3.0).abs() < 1e-8);
        assert!((sol.duals[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn factored_terms_match_dense_terms() {
        let u = DVector::from_column_slice(&[Complex64::new(1.0, -0.5), Complex64::new(0.3, 2.0)]);
        let v = DVector::from_column_slice(&[Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
        let build = |factored: bool| {
            let mut p = SdpProblem::new();
            let b = p.add_hermitian_block(2);
            let s = p.add_scalar();
            p.set_scalar_cost(s, 1.0);
            let r = p.add_constraint(Sense::Geq, 1.0);
            let r2 = p.add_constraint(Sense::Leq, 0.0);
            if factored {
                p.add_hermitian_rank_one_term(r, b, &u, 1.0);
                p.add_hermitian_rank_one_term(r, b, &v, -0.2);
                p.add_hermitian_rank_one_term(r2, b, &v, 1.0);
            } else {
                p.add_hermitian_term(r, b, &(&u * u.adjoint() - &v * v.adjoint() * Complex64::new(0.2, 0.0)));
                p.add_hermitian_term(r2, b, &(&v * v.adjoint()));
            }
            p.add_scalar_term(r2, s, -1.0);
            let r3 = p.add_constraint(Sense::Leq, 5.0);
            p.add_hermitian_term(r3, b, &DMatrix::identity(2, 2));
            solve_sdp(&p, 1e-9).unwrap()
        };
        let (a, b) = (build(true), build(false));
        assert_eq!(a.status, Status::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-8, "{} {}", a.objective, b.objective);
        assert!(a.objective > 0.0);
    }

    #[test]
    fn unknown_block_is_an_error() {
        let mut p = SdpProblem::new();
        let r = p.add_constraint(Sense::Eq, 1.0);
        p.add_symmetric_term(r, BlockId(3), DMatrix::identity(1, 1));
        assert_eq!(solve_sdp(&p, 1e-7), Err(ConicError::UnknownVariable(3)));
    }
}
