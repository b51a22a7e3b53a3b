//! User scheduling: semi-orthogonal multicast-aware grouping and random
//! grouping.
//!
//! Channel rows are handled as column vectors `h†`, so inner products and
//! norms below are the usual ones on `ℂ^{N_t}`.

use crate::partition::GroupPartition;
use crate::{CMat, CVec, Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mutually orthogonal rejection vectors collected while seeding groups.
#[derive(Debug, Clone, Default)]
pub struct OrthoBasis {
    vectors: Vec<CVec>,
}

impl OrthoBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `g` unless it is numerically zero. Returns whether it was added.
    pub fn push(&mut self, g: CVec) -> bool {
        if g.norm() > 0.0 {
            self.vectors.push(g);
            true
        } else {
            false
        }
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `h†` with its components along every basis vector removed.
pub fn rejection(h: &CVec, basis: &OrthoBasis) -> CVec {
    let mut g = h.conjugate();
    for q in basis.vectors() {
        let c = q.dotc(&g) / q.norm_squared();
        g.axpy(-c, q, num_complex::Complex64::new(1.0, 0.0));
    }
    g
}

/// Component of `h†` along `reference†`.
pub fn parallel_projection(h: &CVec, reference: &CVec) -> Result<CVec> {
    let r2 = reference.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::Parameter("projection onto a zero channel".into()));
    }
    let rc = reference.conjugate();
    let c = rc.dotc(&h.conjugate()) / r2;
    Ok(rc * c)
}

fn row(h: &CMat, i: usize) -> CVec {
    h.row(i).transpose()
}

/// Index in `pool` of the largest score; ties go to the lowest user index.
fn argmax(pool: &[usize], mut score: impl FnMut(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    let mut best_user = usize::MAX;
    for (pos, &u) in pool.iter().enumerate() {
        let v = score(u);
        if v > best_val || (v == best_val && u < best_user) {
            best = pos;
            best_val = v;
            best_user = u;
        }
    }
    best
}

/// Multicast-aware grouping of the rows of `h` into `n_groups` groups of
/// `rho` users.
///
/// Group seeds are picked greedily: the strongest user first, then at each
/// step the user whose channel has the largest component orthogonal to all
/// earlier seeds. Each group is then filled with the remaining users most
/// parallel to its seed. Every pick is removed from the pool immediately.
pub fn schedule_multicast_aware(h: &CMat, n_groups: usize, rho: usize) -> Result<GroupPartition> {
    let needed = n_groups * rho;
    if n_groups == 0 || rho == 0 {
        return Err(Error::Parameter("group count and size must be positive".into()));
    }
    if h.nrows() < needed {
        return Err(Error::InsufficientUsers {
            needed,
            available: h.nrows(),
        });
    }
    let rows: Vec<CVec> = (0..h.nrows()).map(|i| row(h, i)).collect();
    let mut pool: Vec<usize> = (0..h.nrows()).collect();
    let mut basis = OrthoBasis::new();
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(n_groups);

    for _ in 0..n_groups {
        let pos = argmax(&pool, |u| rejection(&rows[u], &basis).norm());
        let seed = pool.remove(pos);
        basis.push(rejection(&rows[seed], &basis));
        groups.push(vec![seed]);
    }
    for g in groups.iter_mut() {
        let reference = &rows[g[0]];
        for _ in 1..rho {
            let pos = argmax(&pool, |u| {
                parallel_projection(&rows[u], reference).map_or(0.0, |p| p.norm())
            });
            g.push(pool.remove(pos));
        }
    }
    GroupPartition::new(groups)
}

/// Uniformly random disjoint groups drawn from `user_ids`.
pub fn schedule_random(user_ids: &[usize], n_groups: usize, rho: usize, rng_seed: u64) -> Result<GroupPartition> {
    let needed = n_groups * rho;
    if n_groups == 0 || rho == 0 {
        return Err(Error::Parameter("group count and size must be positive".into()));
    }
    if user_ids.len() < needed {
        return Err(Error::InsufficientUsers {
            needed,
            available: user_ids.len(),
        });
    }
    let mut ids = user_ids.to_vec();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    GroupPartition::new(ids[..needed].chunks(rho).map(<[usize]>::to_vec).collect())
}

/// Rounds of multicast-aware scheduling over the whole pool. Each round
/// takes `n_groups·rho` users out of the pool; users that cannot fill a
/// further round are not served.
pub fn multicast_aware_rounds(h: &CMat, n_groups: usize, rho: usize) -> Result<Vec<GroupPartition>> {
    let needed = n_groups * rho;
    if h.nrows() < needed {
        return Err(Error::InsufficientUsers {
            needed,
            available: h.nrows(),
        });
    }
    let mut remaining: Vec<usize> = (0..h.nrows()).collect();
    let mut rounds = Vec::new();
    while remaining.len() >= needed {
        let sub = h.select_rows(&remaining);
        let part = schedule_multicast_aware(&sub, n_groups, rho)?;
        let mapped: Vec<Vec<usize>> = part
            .groups()
            .iter()
            .map(|g| g.iter().map(|&i| remaining[i]).collect())
            .collect();
        let taken: std::collections::HashSet<usize> = mapped.iter().flatten().copied().collect();
        remaining.retain(|u| !taken.contains(u));
        rounds.push(GroupPartition::new(mapped)?);
    }
    Ok(rounds)
}

/// Rounds of random grouping where group `k` of every round holds `rho`
/// users of beam `k`. The number of rounds is set by the smallest beam;
/// leftovers are not served.
pub fn random_beam_rounds(beam_users: &[Vec<usize>], rho: usize, rng_seed: u64) -> Result<Vec<GroupPartition>> {
    if beam_users.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if rho == 0 {
        return Err(Error::Parameter("group size must be positive".into()));
    }
    let n_rounds = beam_users.iter().map(Vec::len).min().unwrap_or(0) / rho;
    if n_rounds == 0 {
        return Err(Error::InsufficientUsers {
            needed: rho,
            available: beam_users.iter().map(Vec::len).min().unwrap_or(0),
        });
    }
    let per_beam: Vec<GroupPartition> = beam_users
        .iter()
        .enumerate()
        .map(|(k, users)| schedule_random(users, n_rounds, rho, rng_seed ^ (k as u64).wrapping_mul(0xA24B_AED4_963E_E407)))
        .collect::<Result<_>>()?;
    (0..n_rounds)
        .map(|r| GroupPartition::new(per_beam.iter().map(|p| p.group(r).to_vec()).collect()))
        .collect()
}

/// Groups `{beam k's users}` for the first `rho` users of each beam.
pub fn beam_groups(beam_users: &[Vec<usize>], rho: usize) -> Result<GroupPartition> {
    let groups = beam_users
        .iter()
        .map(|u| {
            if u.len() < rho {
                Err(Error::InsufficientUsers {
                    needed: rho,
                    available: u.len(),
                })
            } else {
                Ok(u[..rho].to_vec())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GroupPartition::new(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn v(x: &[Complex64]) -> CVec {
        CVec::from_column_slice(x)
    }

    #[test]
    fn rejection_cases() {
        let h = v(&[c(1.0, 2.0), c(-0.5, 0.3)]);
        assert_eq!(rejection(&h, &OrthoBasis::new()), h.conjugate());
        let mut basis = OrthoBasis::new();
        basis.push(h.conjugate() * c(0.0, 3.0));
        assert!(rejection(&h, &basis).norm() < 1e-12);
        let mut ortho = OrthoBasis::new();
        ortho.push(v(&[c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(ortho.is_empty());
        ortho.push(v(&[c(0.3, -0.3), c(0.0, 0.0)]));
        let e2 = v(&[c(0.0, 0.0), c(2.0, 1.0)]);
        assert_eq!(rejection(&e2, &ortho), e2.conjugate());
    }

    #[test]
    fn projection_cases() {
        let r = v(&[c(1.0, -1.0), c(0.5, 2.0)]);
        assert!((parallel_projection(&r, &r).unwrap().norm() - r.norm()).abs() < 1e-12);
        let perp = v(&[c(2.0, 0.5), c(0.0, 0.0)]);
        let e2 = v(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(parallel_projection(&perp, &e2).unwrap().norm() < 1e-15);
        let h = v(&[c(0.3, 0.1), c(-1.0, 0.4)]);
        let rot = &h * Complex64::from_polar(1.0, 1.1);
        let a = parallel_projection(&h, &r).unwrap().norm();
        let b = parallel_projection(&rot, &r).unwrap().norm();
        assert!((a - b).abs() < 1e-12);
        assert!(parallel_projection(&h, &v(&[c(0.0, 0.0), c(0.0, 0.0)])).is_err());
    }

    #[test]
    fn orthogonal_pairs_are_grouped() {
        let h = CMat::from_row_slice(4, 2, &[
            c(2.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(1.0, 0.0),
            c(2.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(1.0, 0.0),
        ]);
        let p = schedule_multicast_aware(&h, 2, 2).unwrap();
        assert_eq!(p.groups(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn single_user_groups_are_the_seeds() {
        let h = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(1.0, 0.0)]);
        let p = schedule_multicast_aware(&h, 2, 1).unwrap();
        assert_eq!(p.groups(), &[vec![1], vec![0]]);
        assert!(matches!(
            schedule_multicast_aware(&h, 2, 2),
            Err(Error::InsufficientUsers { needed: 4, available: 2 })
        ));
    }

    #[test]
    fn random_grouping_is_seeded() {
        let ids: Vec<usize> = (10..30).collect();
        let a = schedule_random(&ids, 3, 4, 5).unwrap();
        assert_eq!(a, schedule_random(&ids, 3, 4, 5).unwrap());
        assert!(a.groups().iter().all(|g| g.len() == 4));
        assert!(a.groups().iter().flatten().all(|u| ids.contains(u)));
        assert!(schedule_random(&ids, 3, 7, 5).is_err());
    }

    #[test]
    fn rounds_drop_the_remainder() {
        let h = CMat::from_fn(11, 2, |i, j| c((i + 1) as f64 * if j == i % 2 { 1.0 } else { 0.2 }, 0.1 * j as f64));
        let rounds = multicast_aware_rounds(&h, 2, 2).unwrap();
        assert_eq!(rounds.len(), 2);
        let mut all: Vec<usize> = rounds.iter().flat_map(|p| p.groups().concat()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 8);

        let beams = vec![(0..5).collect::<Vec<_>>(), (5..12).collect()];
        let r = random_beam_rounds(&beams, 2, 1).unwrap();
        assert_eq!(r.len(), 2);
        for p in &r {
            assert!(p.group(0).iter().all(|u| *u < 5));
            assert!(p.group(1).iter().all(|u| *u >= 5));
        }
    }
}
