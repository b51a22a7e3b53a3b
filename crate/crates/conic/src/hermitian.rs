//! Real symmetric embedding of complex Hermitian matrices.
//!
//! `M = A + jB` maps to `[[A, -B], [B, A]]`. The map preserves positive
//! semidefiniteness and doubles every eigenvalue's multiplicity, and
//! `tr(emb(M) emb(X)) = 2 Re tr(MX)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn embed(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ri) = (i / n, i % n);
        let (bj, rj) = (j / n, j % n);
        let v = m[(ri, rj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => v.re,
            (0, 1) => -v.im,
            _ => v.im,
        }
    })
}

/// Inverse of [`embed`] for any real symmetric `2n × 2n` matrix.
///
/// The input is first averaged with its image under `J = [[0, -I], [I, 0]]`,
/// which leaves `tr(emb(M) Y)` unchanged for every Hermitian `M` and keeps a
/// PSD input PSD.
pub fn extract(y: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = y.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (y[(i, j)] + y[(n + i, n + j)]);
        let im = 0.5 * (y[(n + i, j)] - y[(i, n + j)]);
        Complex64::new(re, im)
    })
}
