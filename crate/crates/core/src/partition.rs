use crate::{Error, Result};

/// Disjoint user groups, one multicast frame per antenna.
///
/// User indices refer to rows of the channel matrix the partition is used
/// with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
}

impl GroupPartition {
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for g in &groups {
            for &u in g {
                if !seen.insert(u) {
                    return Err(Error::Parameter(format!("user {u} is in more than one group")));
                }
            }
        }
        Ok(Self { groups })
    }

    /// Groups `{0..ρ}`, `{ρ..2ρ}`, ... over `n_groups·ρ` consecutive users.
    pub fn consecutive(n_groups: usize, rho: usize) -> Self {
        Self {
            groups: (0..n_groups).map(|k| (k * rho..(k + 1) * rho).collect()).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, k: usize) -> &[usize] {
        &self.groups[k]
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_users(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Largest group size.
    pub fn rho(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Checks every index is below `n_rows`.
    pub fn check_rows(&self, n_rows: usize) -> Result<()> {
        match self.groups.iter().flatten().find(|&&u| u >= n_rows) {
            Some(u) => Err(Error::Dimension(format!("user {u} but only {n_rows} channel rows"))),
            None => Ok(()),
        }
    }

    /// `group_of[i]` for every user index below `n_rows`; `None` if unscheduled.
    pub fn membership(&self, n_rows: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_rows];
        for (k, g) in self.groups.iter().enumerate() {
            for &u in g {
                if u < n_rows {
                    out[u] = Some(k);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_groups_are_rejected() {
        assert!(GroupPartition::new(vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(GroupPartition::new(vec![]).is_err());
    }

    #[test]
    fn consecutive_layout() {
        let p = GroupPartition::consecutive(3, 2);
        assert_eq!(p.group(2), &[4, 5]);
        assert_eq!(p.n_users(), 6);
        assert_eq!(p.rho(), 2);
        assert_eq!(p.membership(7), vec![Some(0), Some(0), Some(1), Some(1), Some(2), Some(2), None]);
        assert!(p.check_rows(5).is_err());
    }
}
