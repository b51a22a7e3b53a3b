//! Small dense conic solvers.
//!
//! Three problem classes are supported, all solved with Mehrotra-style
//! primal-dual interior point iterations:
//!
//! * [`LpProblem`]: linear objective, linear (in)equalities and bounds.
//! * [`QpProblem`]: as above plus a convex quadratic objective term.
//! * [`SdpProblem`]: linear objective over real symmetric or complex
//!   Hermitian PSD matrix variables and nonnegative scalars, with linear
//!   trace constraints. Hermitian blocks are solved through the real
//!   symmetric embedding `[[Re, -Im], [Im, Re]]`.
//!
//! Infeasibility is reported through [`Status`], never as an error. Every
//! solution carries KKT residuals computed by the checker in [`kkt`], which
//! works from the problem data and the returned point only.

mod dump;
pub mod hermitian;
pub mod kkt;
mod qp;
mod sdp;

pub use dump::Dump;
pub use qp::{solve_lp, solve_qp, solve_qp_with, ConicSolution, LinearConstraints, LpProblem, QpProblem};
pub use sdp::{solve_sdp, solve_sdp_with, BlockId, BlockKind, Sense, SdpProblem, SdpSolution, ScalarId};

use thiserror::Error;

/// Default optimality tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default interior point iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Termination state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// All KKT residuals are below the requested tolerance.
    Optimal,
    /// A Farkas-type certificate of primal infeasibility was found.
    Infeasible,
    /// A certificate of dual infeasibility (unbounded objective) was found.
    Unbounded,
    /// The iteration cap was reached without meeting any criterion.
    MaxIterations,
}

impl Status {
    pub fn is_optimal(self) -> bool {
        self == Status::Optimal
    }
}

/// Scaled KKT residuals of a primal-dual pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.complementarity)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.primal < tol && self.dual < tol && self.complementarity < tol
    }
}

/// Iteration controls shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Malformed problem data. Infeasibility is not an error.
#[derive(Debug, Error, PartialEq)]
pub enum ConicError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite problem data in {0}")]
    NonFinite(&'static str),
    #[error("quadratic term is not symmetric positive semidefinite")]
    NotPsd,
    #[error("constraint references undeclared variable {0}")]
    UnknownVariable(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}
