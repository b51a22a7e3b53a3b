//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::{LinkBudgetParams, BOLTZMANN};
use crate::precoding::SolverConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    MaxMinRef,
    SumRate,
    SumRateAvailable,
    SumRateModcod,
    Conventional,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MaxMinRef => "maxmin-ref",
            Algorithm::SumRate => "sr",
            Algorithm::SumRateAvailable => "sra",
            Algorithm::SumRateModcod => "srm",
            Algorithm::Conventional => "conventional",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "maxmin-ref" | "maxmin" => Algorithm::MaxMinRef,
            "sr" => Algorithm::SumRate,
            "sra" => Algorithm::SumRateAvailable,
            "srm" => Algorithm::SumRateModcod,
            "conventional" => Algorithm::Conventional,
            _ => return Err(Error::Config(format!("unknown algorithm {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    /// Each group holds random users of one beam.
    Random,
    MulticastAware,
}

impl SchedulerKind {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Random => "random",
            SchedulerKind::MulticastAware => "multicast-aware",
        }
    }
}

impl FromStr for SchedulerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(SchedulerKind::Random),
            "multicast-aware" | "multicast_aware" => Ok(SchedulerKind::MulticastAware),
            _ => Err(Error::Config(format!("unknown scheduler {s:?}"))),
        }
    }
}

/// What to do with a round whose precoding problem is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasiblePolicy {
    Error,
    /// Leave the round out of every average and count it.
    Skip,
}

impl FromStr for InfeasiblePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "error" => Ok(InfeasiblePolicy::Error),
            "skip" => Ok(InfeasiblePolicy::Skip),
            _ => Err(Error::Config(format!("unknown infeasible policy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternSource {
    HexGrid {
        rows: usize,
        cols: usize,
        boresight_gain_dbi: f64,
        beamwidth_deg: f64,
        nadir_offset_deg: f64,
    },
    /// CSV `user_id,feed_id,gain_dbi`; all users at one slant range.
    File { path: PathBuf, slant_range_m: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: LinkBudgetParams,
    pub pattern: PatternSource,
    /// Beam colors for the conventional baseline; `None` uses the hex-grid
    /// coloring.
    pub colors: Option<Vec<usize>>,
    pub modcod_file: Option<PathBuf>,
    pub users_per_beam: usize,
    pub rho: usize,
    pub drops: usize,
    /// Total on-board powers in watts, one run per entry.
    pub power_sweep_w: Vec<f64>,
    pub gamma_min_db: f64,
    pub scheduler: SchedulerKind,
    pub algorithm: Algorithm,
    pub solver: SolverConfig,
    pub maxmin_rel_tol: f64,
    pub on_infeasible: InfeasiblePolicy,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            link: LinkBudgetParams::default(),
            pattern: PatternSource::HexGrid {
                rows: 3,
                cols: 3,
                boresight_gain_dbi: 52.0,
                beamwidth_deg: 0.5,
                nadir_offset_deg: 6.0,
            },
            colors: None,
            modcod_file: None,
            users_per_beam: 100,
            rho: 2,
            drops: 1,
            power_sweep_w: vec![50.0],
            gamma_min_db: -2.85,
            scheduler: SchedulerKind::Random,
            algorithm: Algorithm::SumRateModcod,
            solver: SolverConfig::default(),
            maxmin_rel_tol: 1e-2,
            on_infeasible: InfeasiblePolicy::Error,
            seed: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses a config file on top of the defaults. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {kv:?} is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "carrier_frequency_hz" => self.link.carrier_frequency = num(key, value)?,
            "clear_sky_temp_k" => self.link.clear_sky_temp = num(key, value)?,
            "user_bandwidth_hz" => self.link.user_bandwidth = num(key, value)?,
            "obo_db" => self.link.obo_db = num(key, value)?,
            "rolloff" => self.link.rolloff = num(key, value)?,
            "rx_antenna_gain_dbi" => self.link.rx_antenna_gain_dbi = num(key, value)?,
            "boltzmann" => self.link.boltzmann = num(key, value)?,
            "power_sweep_w" => self.power_sweep_w = list(key, value)?,
            "pattern" => match value {
                "hex" => {
                    if !matches!(self.pattern, PatternSource::HexGrid { .. }) {
                        self.pattern = Self::default().pattern;
                    }
                }
                _ => return Err(Error::Config(format!("pattern: expected \"hex\", got {value:?}"))),
            },
            "grid_rows" | "grid_cols" | "boresight_gain_dbi" | "beamwidth_deg" | "nadir_offset_deg" => {
                let PatternSource::HexGrid {
                    rows,
                    cols,
                    boresight_gain_dbi,
                    beamwidth_deg,
                    nadir_offset_deg,
                } = &mut self.pattern
                else {
                    return Err(Error::Config(format!("{key} only applies to the hex pattern")));
                };
                match key {
                    "grid_rows" => *rows = num(key, value)?,
                    "grid_cols" => *cols = num(key, value)?,
                    "boresight_gain_dbi" => *boresight_gain_dbi = num(key, value)?,
                    "beamwidth_deg" => *beamwidth_deg = num(key, value)?,
                    _ => *nadir_offset_deg = num(key, value)?,
                }
            }
            "pattern_file" => {
                let slant = match &self.pattern {
                    PatternSource::File { slant_range_m, .. } => *slant_range_m,
                    PatternSource::HexGrid { nadir_offset_deg, .. } => crate::channel::slant_range(*nadir_offset_deg),
                };
                self.pattern = PatternSource::File {
                    path: PathBuf::from(value),
                    slant_range_m: slant,
                };
            }
            "slant_range_m" => match &mut self.pattern {
                PatternSource::File { slant_range_m, .. } => *slant_range_m = num(key, value)?,
                _ => return Err(Error::Config("slant_range_m needs pattern_file first".into())),
            },
            "colors" => self.colors = Some(list(key, value)?),
            "colors_file" => {
                let text = std::fs::read_to_string(value)
                    .map_err(|e| Error::Config(format!("colors_file {value:?}: {e}")))?;
                self.colors = Some(super::io::read_colors_csv(&text)?);
            }
            "modcod_file" => self.modcod_file = Some(PathBuf::from(value)),
            "users_per_beam" => self.users_per_beam = num(key, value)?,
            "rho" => self.rho = num(key, value)?,
            "drops" => self.drops = num(key, value)?,
            "gamma_min_db" => self.gamma_min_db = num(key, value)?,
            "scheduler" => self.scheduler = value.parse()?,
            "algorithm" => self.algorithm = value.parse()?,
            "t_max" => self.solver.t_max = num(key, value)?,
            "delta0" => self.solver.delta0 = num(key, value)?,
            "n_rand" => self.solver.n_rand = num(key, value)?,
            "outer_tol" => self.solver.outer_tol = num(key, value)?,
            "outer_max_iters" => self.solver.outer_max_iters = num(key, value)?,
            "conic_tol" => self.solver.conic_tol = num(key, value)?,
            "maxmin_rel_tol" => self.maxmin_rel_tol = num(key, value)?,
            "on_infeasible" => self.on_infeasible = value.parse()?,
            "seed" => self.seed = Some(num(key, value)?),
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.solver.validate()?;
        if self.users_per_beam == 0 || self.rho == 0 || self.drops == 0 {
            return Err(Error::Config("users_per_beam, rho and drops must be positive".into()));
        }
        if self.power_sweep_w.is_empty() || self.power_sweep_w.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::Config("power_sweep_w needs positive powers".into()));
        }
        if !self.gamma_min_db.is_finite() {
            return Err(Error::Config("gamma_min_db must be finite".into()));
        }
        if !(self.maxmin_rel_tol > 0.0) {
            return Err(Error::Config("maxmin_rel_tol must be positive".into()));
        }
        if let PatternSource::HexGrid { rows, cols, beamwidth_deg, .. } = self.pattern {
            if rows * cols == 0 || !(beamwidth_deg > 0.0) {
                return Err(Error::Config("hex grid needs beams and a positive beamwidth".into()));
            }
        }
        if self.colors.as_ref().is_some_and(|c| c.iter().any(|&x| x > 3)) {
            return Err(Error::Coloring("colors must be in 0..4".into()));
        }
        Ok(())
    }

    /// The seed, which every run must set.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config("a seed is required".into()))
    }

    /// Renders the config back into the file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let l = &self.link;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("carrier_frequency_hz", l.carrier_frequency.to_string());
        kv("clear_sky_temp_k", l.clear_sky_temp.to_string());
        kv("user_bandwidth_hz", l.user_bandwidth.to_string());
        kv("obo_db", l.obo_db.to_string());
        kv("rolloff", l.rolloff.to_string());
        kv("rx_antenna_gain_dbi", l.rx_antenna_gain_dbi.to_string());
        if l.boltzmann != BOLTZMANN {
            kv("boltzmann", l.boltzmann.to_string());
        }
        kv("power_sweep_w", join(&self.power_sweep_w));
        match &self.pattern {
            PatternSource::HexGrid {
                rows,
                cols,
                boresight_gain_dbi,
                beamwidth_deg,
                nadir_offset_deg,
            } => {
                kv("pattern", "hex".into());
                kv("grid_rows", rows.to_string());
                kv("grid_cols", cols.to_string());
                kv("boresight_gain_dbi", boresight_gain_dbi.to_string());
                kv("beamwidth_deg", beamwidth_deg.to_string());
                kv("nadir_offset_deg", nadir_offset_deg.to_string());
            }
            PatternSource::File { path, slant_range_m } => {
                kv("pattern_file", path.display().to_string());
                kv("slant_range_m", slant_range_m.to_string());
            }
        }
        if let Some(c) = &self.colors {
            kv("colors", join(c));
        }
        if let Some(m) = &self.modcod_file {
            kv("modcod_file", m.display().to_string());
        }
        kv("users_per_beam", self.users_per_beam.to_string());
        kv("rho", self.rho.to_string());
        kv("drops", self.drops.to_string());
        kv("gamma_min_db", self.gamma_min_db.to_string());
        kv("scheduler", self.scheduler.name().into());
        kv("algorithm", self.algorithm.name().into());
        let c = &self.solver;
        kv("t_max", c.t_max.to_string());
        kv("delta0", c.delta0.to_string());
        kv("n_rand", c.n_rand.to_string());
        kv("outer_tol", c.outer_tol.to_string());
        kv("outer_max_iters", c.outer_max_iters.to_string());
        kv("conic_tol", c.conic_tol.to_string());
        kv("maxmin_rel_tol", self.maxmin_rel_tol.to_string());
        let policy = match self.on_infeasible {
            InfeasiblePolicy::Error => "error",
            InfeasiblePolicy::Skip => "skip",
        };
        kv("on_infeasible", policy.into());
        if let Some(seed) = self.seed {
            kv("seed", seed.to_string());
        }
        kv("output_dir", self.output_dir.display().to_string());
        s
    }
}
