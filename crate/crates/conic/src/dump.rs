//! Plain-text problem dumps for cross-checking with external tools.
//!
//! Layout: a header line (`lp`, `qp` or `sdp`) followed by named sections.
//! Matrices are written as `rows cols` then one row per line; numbers use
//! 17 significant digits.

use std::fmt::Write;

use nalgebra::DMatrix;

use crate::qp::{LinearConstraints, LpProblem, QpProblem};
use crate::sdp::{BlockKind, Sense, SdpProblem};

pub trait Dump {
    fn dump(&self) -> String;
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "{name} {} {}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| num(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn vector(out: &mut String, name: &str, v: &[f64]) {
    let _ = writeln!(out, "{name} {}", v.len());
    let row: Vec<String> = v.iter().map(|x| num(*x)).collect();
    let _ = writeln!(out, "{}", row.join(" "));
}

fn rows(out: &mut String, name: &str, r: &[Vec<f64>], n: usize) {
    let m = DMatrix::from_fn(r.len(), n, |i, j| r[i][j]);
    matrix(out, name, &m);
}

fn constraints(out: &mut String, c: &LinearConstraints) {
    let n = c.n_vars();
    rows(out, "G", &c.ineq_rows, n);
    vector(out, "h", &c.ineq_rhs);
    rows(out, "A", &c.eq_rows, n);
    vector(out, "b", &c.eq_rhs);
    vector(out, "lower", &c.lower);
    vector(out, "upper", &c.upper);
}

impl Dump for LpProblem {
    fn dump(&self) -> String {
        let mut out = String::from("lp\n");
        vector(&mut out, "c", self.cost.as_slice());
        constraints(&mut out, &self.constraints);
        out
    }
}

impl Dump for QpProblem {
    fn dump(&self) -> String {
        let mut out = String::from("qp\n");
        matrix(&mut out, "P", &self.quad);
        vector(&mut out, "c", self.cost.as_slice());
        constraints(&mut out, &self.constraints);
        out
    }
}

impl Dump for SdpProblem {
    /// Hermitian blocks are written in their real embedded form.
    fn dump(&self) -> String {
        let mut out = String::from("sdp\n");
        let _ = writeln!(out, "blocks {}", self.kinds.len());
        for (b, kind) in self.kinds.iter().enumerate() {
            let tag = match kind {
                BlockKind::Symmetric(n) => format!("symmetric {n}"),
                BlockKind::Hermitian(n) => format!("hermitian {n}"),
            };
            let _ = writeln!(out, "block {b} {tag}");
            matrix(&mut out, "C", &self.block_cost[b]);
        }
        vector(&mut out, "scalar_cost", &self.scalar_cost);
        let _ = writeln!(out, "constraints {}", self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let sense = match row.sense {
                Sense::Eq => "=",
                Sense::Leq => "<=",
                Sense::Geq => ">=",
            };
            let _ = writeln!(out, "row {i} {sense} {}", num(row.rhs));
            for (b, a) in &row.blocks {
                matrix(&mut out, &format!("A block {b}"), a);
            }
            for (s, v) in &row.scalars {
                let _ = writeln!(out, "a scalar {s} {}", num(*v));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn lp_layout() {
        let mut lp = LpProblem::new(DVector::from_column_slice(&[1.0, -2.0]));
        lp.constraints.leq(&[1.0, 1.0], 4.0);
        let text = lp.dump();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lp");
        assert_eq!(lines[1], "c 2");
        assert_eq!(lines[2], "1.0000000000000000e0 -2.0000000000000000e0");
        assert_eq!(lines[3], "G 1 2");
    }

    #[test]
    fn sdp_header_and_rows() {
        let mut p = SdpProblem::new();
        let b = p.add_hermitian_block(1);
        let r = p.add_constraint(Sense::Leq, 2.0);
        p.add_symmetric_term(r, b, DMatrix::identity(2, 2));
        let text = p.dump();
        assert!(text.starts_with("sdp\nblocks 1\nblock 0 hermitian 1\nC 2 2\n"));
        assert!(text.contains("row 0 <= 2.0000000000000000e0\nA block 0 2 2\n"));
    }
}
