//! CSV formats for patterns, channels, precoders, partitions and colorings.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::partition::GroupPartition;
use crate::precoding::PrecodingMatrix;
use crate::{CMat, Error, Result};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Data rows of a CSV with the given header. `#` lines are skipped.
fn rows<'a>(text: &'a str, header: &str) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(Error::Parse(format!("expected header {header:?}, got {other:?}"))),
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(n, l)| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            if f.len() != width {
                return Err(Error::Parse(format!("row {}: {} fields, expected {width}", n + 1, f.len())));
            }
            Ok(f)
        })
        .collect()
}

fn idx(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad index {s:?}")))
}

fn val(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

/// Fills a dense `rows × cols` table from `(row, col, value)` triples,
/// requiring every cell exactly once.
fn dense<T: Clone + nalgebra::Scalar>(cells: Vec<(usize, usize, T)>, zero: T) -> Result<DMatrix<T>> {
    if cells.is_empty() {
        return Err(Error::Empty);
    }
    let nr = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let nc = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
    if cells.len() != nr * nc {
        return Err(Error::Parse(format!("{} cells for a {nr}×{nc} table", cells.len())));
    }
    let mut m = DMatrix::from_element(nr, nc, zero);
    let mut seen = vec![false; nr * nc];
    for (r, c, v) in cells {
        if std::mem::replace(&mut seen[r * nc + c], true) {
            return Err(Error::Parse(format!("cell ({r}, {c}) given twice")));
        }
        m[(r, c)] = v;
    }
    Ok(m)
}

/// `user_id,feed_id,gain_dbi` into a users × feeds matrix.
pub fn read_pattern_csv(text: &str) -> Result<DMatrix<f64>> {
    let cells = rows(text, "user_id,feed_id,gain_dbi")?
        .into_iter()
        .map(|f| Ok((idx(f[0])?, idx(f[1])?, val(f[2])?)))
        .collect::<Result<Vec<_>>>()?;
    let m = dense(cells, 0.0)?;
    if m.iter().any(|g| !g.is_finite()) {
        return Err(Error::Parse("gains must be finite".into()));
    }
    Ok(m)
}

pub fn write_pattern_csv(gains_dbi: &DMatrix<f64>) -> String {
    let mut s = String::from("user_id,feed_id,gain_dbi\n");
    for i in 0..gains_dbi.nrows() {
        for j in 0..gains_dbi.ncols() {
            let _ = writeln!(s, "{i},{j},{}", fmt_f64(gains_dbi[(i, j)]));
        }
    }
    s
}

fn write_complex(header: &str, m: &CMat) -> String {
    let mut s = format!("{header}\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(s, "{i},{j},{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
    }
    s
}

fn read_complex(text: &str, header: &str) -> Result<CMat> {
    let cells = rows(text, header)?
        .into_iter()
        .map(|f| Ok((idx(f[0])?, idx(f[1])?, Complex64::new(val(f[2])?, val(f[3])?))))
        .collect::<Result<Vec<_>>>()?;
    dense(cells, Complex64::new(0.0, 0.0))
}

/// `user_id,feed_id,re,im`.
pub fn write_channel_csv(h: &CMat) -> String {
    write_complex("user_id,feed_id,re,im", h)
}

pub fn read_channel_csv(text: &str) -> Result<CMat> {
    read_complex(text, "user_id,feed_id,re,im")
}

/// `group_id,antenna_id,re,im`; row `(k, n)` is entry `n` of `w_k`.
pub fn write_precoder_csv(w: &PrecodingMatrix) -> String {
    write_complex("group_id,antenna_id,re,im", &w.w.transpose())
}

pub fn read_precoder_csv(text: &str) -> Result<PrecodingMatrix> {
    Ok(PrecodingMatrix::new(read_complex(text, "group_id,antenna_id,re,im")?.transpose()))
}

/// `round,group_id,user_id`.
pub fn write_partition_csv(rounds: &[GroupPartition]) -> String {
    let mut s = String::from("round,group_id,user_id\n");
    for (r, p) in rounds.iter().enumerate() {
        for (k, g) in p.groups().iter().enumerate() {
            for u in g {
                let _ = writeln!(s, "{r},{k},{u}");
            }
        }
    }
    s
}

pub fn read_partition_csv(text: &str) -> Result<Vec<GroupPartition>> {
    let mut rounds: Vec<Vec<Vec<usize>>> = Vec::new();
    for f in rows(text, "round,group_id,user_id")? {
        let (r, k, u) = (idx(f[0])?, idx(f[1])?, idx(f[2])?);
        if rounds.len() <= r {
            rounds.resize(r + 1, Vec::new());
        }
        if rounds[r].len() <= k {
            rounds[r].resize(k + 1, Vec::new());
        }
        rounds[r][k].push(u);
    }
    if rounds.is_empty() {
        return Err(Error::Empty);
    }
    rounds.into_iter().map(GroupPartition::new).collect()
}

/// `beam_id,color`.
pub fn read_colors_csv(text: &str) -> Result<Vec<usize>> {
    let mut colors: Vec<Option<usize>> = Vec::new();
    for f in rows(text, "beam_id,color")? {
        let (b, c) = (idx(f[0])?, idx(f[1])?);
        if colors.len() <= b {
            colors.resize(b + 1, None);
        }
        if colors[b].replace(c).is_some() {
            return Err(Error::Parse(format!("beam {b} colored twice")));
        }
    }
    colors
        .into_iter()
        .enumerate()
        .map(|(b, c)| c.ok_or_else(|| Error::Parse(format!("beam {b} has no color"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_roundtrip_is_exact() {
        let h = CMat::from_fn(3, 2, |i, j| Complex64::new(0.1 + i as f64 / 3.0, -(j as f64).exp() * 1e-7));
        assert_eq!(read_channel_csv(&write_channel_csv(&h)).unwrap(), h);
    }

    #[test]
    fn precoder_roundtrip_keeps_columns() {
        let w = PrecodingMatrix::new(CMat::from_fn(2, 3, |n, k| Complex64::new(n as f64, k as f64)));
        let text = write_precoder_csv(&w);
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,"));
        assert!(text.contains("\n2,1,1.0000000000000000e0,2.0000000000000000e0\n"));
        assert_eq!(read_precoder_csv(&text).unwrap(), w);
    }

    #[test]
    fn partition_roundtrip() {
        let rounds = vec![GroupPartition::consecutive(2, 2), GroupPartition::new(vec![vec![7], vec![5]]).unwrap()];
        assert_eq!(read_partition_csv(&write_partition_csv(&rounds)).unwrap(), rounds);
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_pattern_csv("user_id,feed_id,gain_dbi\n0,0,50\n1,1,40\n").is_err());
        assert!(read_pattern_csv("user,feed,gain\n0,0,50\n").is_err());
        assert!(read_pattern_csv("user_id,feed_id,gain_dbi\n0,0,50\n0,0,50\n0,1,2\n1,1,3\n").is_err());
        let g = read_pattern_csv("user_id,feed_id,gain_dbi\n0,0,50\n0,1,20\n1,0,21\n1,1,49\n").unwrap();
        assert_eq!(g[(1, 1)], 49.0);
        assert_eq!(read_colors_csv("beam_id,color\n1,2\n0,3\n").unwrap(), vec![3, 2]);
        assert!(read_colors_csv("beam_id,color\n1,2\n").is_err());
    }
}
