use nalgebra::DMatrix;

use super::types::{Frame, PrecodingMatrix};
use crate::modcod::group_min_sinr;
use crate::CMat;

/// `a[(i, k)] = |h_iᵀ w_k|²` for every channel row and column of `w`.
pub fn gains(h: &CMat, w: &CMat) -> DMatrix<f64> {
    (h * w).map(|z| z.norm_sqr())
}

/// Per-user SINR given gains of unit directions and group powers.
/// Users outside the partition get `0`.
pub fn sinr_from_gains(a: &DMatrix<f64>, powers: &[f64], frame: &Frame) -> Vec<f64> {
    let mut out = vec![0.0; a.nrows()];
    for (k, g) in frame.partition.groups().iter().enumerate() {
        for &i in g {
            let mut interference = frame.noise[i];
            for (l, p) in powers.iter().enumerate() {
                if l != k {
                    interference += p * a[(i, l)];
                }
            }
            out[i] = powers[k] * a[(i, k)] / interference;
        }
    }
    out
}

pub fn sinr(w: &PrecodingMatrix, frame: &Frame) -> Vec<f64> {
    let a = gains(&frame.h, &w.w);
    let ones = vec![1.0; w.n_groups()];
    sinr_from_gains(&a, &ones, frame)
}

/// `[WW†]_nn` for every antenna.
pub fn per_antenna_power(w: &PrecodingMatrix) -> Vec<f64> {
    w.w.row_iter().map(|r| r.norm_squared()).collect()
}

/// `max_n [WW†]_nn / P_n`.
pub fn pac_ratio(w: &PrecodingMatrix, p_ant: &[f64]) -> f64 {
    per_antenna_power(w)
        .iter()
        .zip(p_ant)
        .map(|(l, p)| l / p)
        .fold(0.0, f64::max)
}

/// `Σ_k log2(1 + min_{i∈G_k} SINR_i)` in bps/Hz.
pub fn sum_rate(sinrs: &[f64], frame: &Frame) -> f64 {
    group_min_sinr(sinrs, &frame.partition)
        .iter()
        .map(|s| (1.0 + s).log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GroupPartition;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_group_is_snr() {
        let h = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 1.0)]);
        let w = PrecodingMatrix::new(CMat::from_column_slice(2, 1, &[c(1.5, 0.0), c(0.0, -1.5)]));
        let f = Frame::new(h, GroupPartition::consecutive(1, 1), vec![10.0, 10.0]).unwrap();
        // h·w = 1.5 + 1.5 = 3
        assert!((sinr(&w, &f)[0] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_channel_gives_zero_sinr() {
        let h = CMat::zeros(2, 2);
        let w = PrecodingMatrix::new(CMat::identity(2, 2));
        let f = Frame::new(h, GroupPartition::consecutive(2, 1), vec![1.0, 1.0]).unwrap();
        assert_eq!(sinr(&w, &f), vec![0.0, 0.0]);
    }

    #[test]
    fn column_phase_does_not_matter() {
        let h = CMat::from_fn(4, 2, |i, j| c((i + j) as f64 * 0.3, i as f64 - j as f64));
        let w = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, 0.5 * j as f64 - 0.2));
        let f = Frame::new(h, GroupPartition::consecutive(2, 2), vec![1.0, 1.0]).unwrap();
        let mut rotated = w.clone();
        rotated.column_mut(1).iter_mut().for_each(|z| *z *= Complex64::from_polar(1.0, 1.234));
        let a = sinr(&PrecodingMatrix::new(w), &f);
        let b = sinr(&PrecodingMatrix::new(rotated), &f);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn antenna_powers() {
        let id = PrecodingMatrix::new(CMat::identity(2, 2));
        assert_eq!(per_antenna_power(&id), vec![1.0, 1.0]);
        let w = PrecodingMatrix::new(CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]));
        assert_eq!(per_antenna_power(&w), vec![2.0, 2.0]);
        assert_eq!(pac_ratio(&w, &[4.0, 1.0]), 2.0);
    }
}
