//! Four-color frequency reuse without precoding.

use crate::partition::GroupPartition;
use crate::{CMat, Error, Result};

/// Beam pairs whose centers are at most `1.01×` the closest center spacing.
pub fn neighbor_pairs(centers: &[[f64; 2]]) -> Vec<(usize, usize)> {
    let d = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut min = f64::INFINITY;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            min = min.min(d(&centers[i], &centers[j]));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if d(&centers[i], &centers[j]) <= 1.01 * min {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Checks there is one color in `0..4` per beam and that neighbors differ.
pub fn validate_coloring(colors: &[usize], n_beams: usize, neighbors: &[(usize, usize)]) -> Result<()> {
    if colors.len() != n_beams {
        return Err(Error::Coloring(format!("{} colors for {n_beams} beams", colors.len())));
    }
    if let Some(c) = colors.iter().find(|&&c| c > 3) {
        return Err(Error::Coloring(format!("color {c} is not in 0..4")));
    }
    for &(a, b) in neighbors {
        if a >= n_beams || b >= n_beams {
            return Err(Error::Coloring(format!("neighbor pair ({a}, {b}) out of range")));
        }
        if colors[a] == colors[b] {
            return Err(Error::Coloring(format!("neighboring beams {a} and {b} share color {}", colors[a])));
        }
    }
    Ok(())
}

/// Per-user SINRs when feed `k` radiates `p_ant[k]` for its own group `k`
/// only, and each color uses a quarter of the band.
///
/// Interference comes from the other feeds of the same color. `noise` is
/// the full-band noise power per user; a quarter of it falls in each
/// sub-band. Output is indexed by the users of `partition`, which must have
/// one group per beam.
pub fn conventional_sinr(
    h: &CMat,
    colors: &[usize],
    partition: &GroupPartition,
    p_ant: &[f64],
    noise: &[f64],
) -> Result<Vec<f64>> {
    let n_t = h.ncols();
    if partition.n_groups() != n_t || colors.len() != n_t || p_ant.len() != n_t {
        return Err(Error::Dimension(format!(
            "{} groups, {} colors and {} power limits for {n_t} beams",
            partition.n_groups(),
            colors.len(),
            p_ant.len()
        )));
    }
    partition.check_rows(h.nrows())?;
    if noise.len() != h.nrows() {
        return Err(Error::Dimension(format!("{} noise powers for {} users", noise.len(), h.nrows())));
    }
    let mut out = vec![0.0; h.nrows()];
    for (k, g) in partition.groups().iter().enumerate() {
        for &i in g {
            let signal = p_ant[k] * h[(i, k)].norm_sqr();
            let interference: f64 = (0..n_t)
                .filter(|&l| l != k && colors[l] == colors[k])
                .map(|l| p_ant[l] * h[(i, l)].norm_sqr())
                .sum();
            out[i] = signal / (interference + noise[i] / 4.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{hex_grid_colors, GaussianPattern};
    use num_complex::Complex64;

    #[test]
    fn hex_coloring_is_valid() {
        let p = GaussianPattern::hex_grid(3, 3, 52.0, 0.5);
        let pairs = neighbor_pairs(&p.centers);
        // 3x3 odd-r hex grid: 6 horizontal and 10 diagonal adjacencies.
        assert_eq!(pairs.len(), 16);
        assert!(validate_coloring(&hex_grid_colors(3, 3), 9, &pairs).is_ok());
        assert!(validate_coloring(&[0; 9], 9, &pairs).is_err());
        assert!(validate_coloring(&[0, 1, 4, 0, 1, 2, 3, 0, 1], 9, &[]).is_err());
    }

    #[test]
    fn isolated_beam_sees_only_noise() {
        let h = CMat::from_element(1, 1, Complex64::new(0.0, 2.0));
        let s = conventional_sinr(&h, &[0], &GroupPartition::consecutive(1, 1), &[3.0], &[1.0]).unwrap();
        assert!((s[0] - 4.0 * 3.0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn only_same_color_interferes() {
        let h = CMat::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let part = GroupPartition::consecutive(2, 1);
        let apart = conventional_sinr(&h, &[0, 1], &part, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((apart[0] - 4.0).abs() < 1e-12);
        let shared = conventional_sinr(&h, &[2, 2], &part, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((shared[0] - 1.0 / (0.25 + 0.25)).abs() < 1e-12);
    }
}
