//! MODCOD step function and the average user throughput metric.

use crate::channel::db_to_linear;
use crate::partition::GroupPartition;
use crate::{Error, Result};

const DEFAULT_TABLE: &str = include_str!("../data/dvb_s2x_normal_frames.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModcodRow {
    pub threshold_db: f64,
    pub efficiency: f64,
}

/// Ascending (threshold, spectral efficiency) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ModcodTable {
    rows: Vec<ModcodRow>,
}

/// Result of rounding a SINR down to the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier {
    /// `None` means outage.
    pub index: Option<usize>,
    pub efficiency: f64,
}

impl ModcodTable {
    pub fn new(rows: Vec<ModcodRow>) -> Result<Self> {
        let t = Self { rows };
        t.validate()?;
        Ok(t)
    }

    /// The bundled DVB-S2X normal-frame table.
    pub fn dvb_s2x() -> Self {
        Self::from_csv(DEFAULT_TABLE).expect("bundled MODCOD table is valid")
    }

    /// Parses `threshold_db,spectral_efficiency_bps_hz` rows. Lines starting
    /// with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some("threshold_db,spectral_efficiency_bps_hz") => {}
            other => {
                return Err(Error::Parse(format!("unexpected MODCOD header {other:?}")));
            }
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let mut fields = line.split(',').map(str::trim);
            let parse = |f: Option<&str>| -> Result<f64> {
                f.ok_or_else(|| Error::Parse(format!("MODCOD row {n}: missing field")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("MODCOD row {n}: {e}")))
            };
            let threshold_db = parse(fields.next())?;
            let efficiency = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(Error::Parse(format!("MODCOD row {n}: too many fields")));
            }
            rows.push(ModcodRow {
                threshold_db,
                efficiency,
            });
        }
        Self::new(rows)
    }

    /// Both columns strictly increasing and every row below Shannon capacity.
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Empty);
        }
        for (k, r) in self.rows.iter().enumerate() {
            if !r.threshold_db.is_finite() || !(r.efficiency > 0.0) || !r.efficiency.is_finite() {
                return Err(Error::Table(format!("row {k} is not finite and positive")));
            }
            let cap = (1.0 + db_to_linear(r.threshold_db)).log2();
            if r.efficiency > cap {
                return Err(Error::Table(format!(
                    "row {k}: {} bps/Hz exceeds capacity {cap:.4} at {} dB",
                    r.efficiency, r.threshold_db
                )));
            }
            if k > 0 {
                let p = &self.rows[k - 1];
                if r.threshold_db <= p.threshold_db || r.efficiency <= p.efficiency {
                    return Err(Error::Table(format!("row {k} is not strictly increasing")));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[ModcodRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn lowest_threshold_db(&self) -> f64 {
        self.rows[0].threshold_db
    }

    /// Largest row whose threshold is at or below `sinr_db`.
    pub fn floor(&self, sinr_db: f64) -> Tier {
        let n = self.rows.partition_point(|r| r.threshold_db <= sinr_db);
        match n {
            0 => Tier {
                index: None,
                efficiency: 0.0,
            },
            n => Tier {
                index: Some(n - 1),
                efficiency: self.rows[n - 1].efficiency,
            },
        }
    }

    /// The row one above the floor of `sinr_db`, as `(index, threshold_db)`.
    pub fn ceil(&self, sinr_db: f64) -> Result<(usize, f64)> {
        let next = match self.floor(sinr_db).index {
            None => 0,
            Some(k) => k + 1,
        };
        match self.rows.get(next) {
            Some(r) => Ok((next, r.threshold_db)),
            None => Err(Error::TopTier),
        }
    }

    /// Spectral efficiency at a linear SINR.
    ///
    /// Compares in the linear domain so that `db_to_linear(t)` lands exactly
    /// on the row with threshold `t`.
    pub fn efficiency(&self, sinr: f64) -> f64 {
        let n = self
            .rows
            .partition_point(|r| db_to_linear(r.threshold_db) <= sinr);
        if n == 0 {
            0.0
        } else {
            self.rows[n - 1].efficiency
        }
    }

    /// Tier index at a linear SINR, with the same convention as
    /// [`ModcodTable::efficiency`].
    pub fn tier(&self, sinr: f64) -> Option<usize> {
        self.rows
            .partition_point(|r| db_to_linear(r.threshold_db) <= sinr)
            .checked_sub(1)
    }
}

pub fn floor_to_threshold(sinr_db: f64, table: &ModcodTable) -> Result<Tier> {
    if table.is_empty() {
        return Err(Error::Empty);
    }
    Ok(table.floor(sinr_db))
}

pub fn ceil_to_threshold(sinr_db: f64, table: &ModcodTable) -> Result<(usize, f64)> {
    if table.is_empty() {
        return Err(Error::Empty);
    }
    table.ceil(sinr_db)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputParams {
    pub user_bandwidth: f64,
    pub rolloff: f64,
}

impl Default for ThroughputParams {
    fn default() -> Self {
        Self {
            user_bandwidth: 500e6,
            rolloff: 0.2,
        }
    }
}

impl ThroughputParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.user_bandwidth > 0.0) || !(self.rolloff > 0.0 && self.rolloff < 1.0) {
            return Err(Error::Parameter(format!("bad throughput parameters {self:?}")));
        }
        Ok(())
    }

    /// Symbol-rate prefactor `2B_u/(1+α)` in Gbaud.
    pub fn prefactor_gbaud(&self) -> f64 {
        2.0 * self.user_bandwidth / (1.0 + self.rolloff) / 1e9
    }
}

/// Worst SINR in each group (linear). Empty groups give `0`.
pub fn group_min_sinr(sinrs: &[f64], partition: &GroupPartition) -> Vec<f64> {
    partition
        .groups()
        .iter()
        .map(|g| {
            g.iter()
                .map(|&u| sinrs[u])
                .fold(f64::INFINITY, f64::min)
        })
        .map(|m| if m.is_finite() { m } else { 0.0 })
        .collect()
}

/// Average user throughput in Gbps per beam, from linear SINRs.
pub fn average_user_throughput(
    sinrs: &[f64],
    partition: &GroupPartition,
    table: &ModcodTable,
    params: &ThroughputParams,
) -> f64 {
    let mins = group_min_sinr(sinrs, partition);
    let total: f64 = mins.iter().map(|&s| table.efficiency(s)).sum();
    params.prefactor_gbaud() * total / partition.n_groups() as f64
}
