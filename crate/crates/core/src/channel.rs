//! User drops, beam gains, link budget and the composite channel `H = ΦB`.
//!
//! Directions are expressed as angular offsets in degrees from the cluster
//! center, as seen from the satellite. Small-angle geometry is used for
//! off-boresight angles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::{CMat, Error, Result};

pub const BOLTZMANN: f64 = 1.380649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
pub const GEO_RADIUS_M: f64 = 42_164_000.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudgetParams {
    pub carrier_frequency: f64,
    pub clear_sky_temp: f64,
    pub user_bandwidth: f64,
    pub obo_db: f64,
    pub total_power: f64,
    pub rolloff: f64,
    pub rx_antenna_gain_dbi: f64,
    pub boltzmann: f64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        Self {
            carrier_frequency: 20e9,
            clear_sky_temp: 235.3,
            user_bandwidth: 500e6,
            obo_db: 5.0,
            total_power: 50.0,
            rolloff: 0.2,
            rx_antenna_gain_dbi: 40.7,
            boltzmann: BOLTZMANN,
        }
    }
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency", self.carrier_frequency),
            ("clear_sky_temp", self.clear_sky_temp),
            ("user_bandwidth", self.user_bandwidth),
            ("total_power", self.total_power),
            ("boltzmann", self.boltzmann),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.obo_db >= 0.0 && self.obo_db.is_finite()) {
            return Err(Error::Parameter(format!("obo must be nonnegative, got {}", self.obo_db)));
        }
        if !(self.rolloff > 0.0 && self.rolloff < 1.0) {
            return Err(Error::Parameter(format!("rolloff must be in (0,1), got {}", self.rolloff)));
        }
        if !self.rx_antenna_gain_dbi.is_finite() {
            return Err(Error::Parameter("rx antenna gain must be finite".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// Total power left after output back-off.
    pub fn derated_power(&self) -> f64 {
        self.total_power / db_to_linear(self.obo_db)
    }

    /// Equal per-antenna limits `P_n` after back-off.
    pub fn per_antenna_limits(&self, n_antennas: usize) -> Vec<f64> {
        vec![self.derated_power() / n_antennas as f64; n_antennas]
    }
}

/// Gaussian-in-angle beams, `g(θ) = exp(−4 ln2 (θ/θ3dB)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPattern {
    /// Beam centers, degrees from the cluster center.
    pub centers: Vec<[f64; 2]>,
    pub boresight_gain_dbi: f64,
    pub beamwidth_deg: f64,
    /// Radius of each beam's coverage disc, degrees.
    pub coverage_radius_deg: f64,
    /// Off-nadir angle of the cluster center, degrees; sets slant ranges.
    pub nadir_offset_deg: f64,
}

impl GaussianPattern {
    /// `rows × cols` hexagonal grid (odd rows shifted right) with touching
    /// coverage discs of radius `θ3dB/2`.
    pub fn hex_grid(rows: usize, cols: usize, boresight_gain_dbi: f64, beamwidth_deg: f64) -> Self {
        let radius = beamwidth_deg / 2.0;
        let spacing = 3f64.sqrt() * radius;
        let mut centers = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = (c as f64 + 0.5 * (r % 2) as f64) * spacing;
                let y = r as f64 * spacing * 3f64.sqrt() / 2.0;
                centers.push([x, y]);
            }
        }
        let n = centers.len().max(1) as f64;
        let mx = centers.iter().map(|p| p[0]).sum::<f64>() / n;
        let my = centers.iter().map(|p| p[1]).sum::<f64>() / n;
        for p in &mut centers {
            p[0] -= mx;
            p[1] -= my;
        }
        Self {
            centers,
            boresight_gain_dbi,
            beamwidth_deg,
            coverage_radius_deg: radius,
            nadir_offset_deg: 6.0,
        }
    }

    /// Gain in dBi at off-boresight angle `theta_deg`.
    pub fn gain_dbi(&self, theta_deg: f64) -> f64 {
        let g = (-4.0 * std::f64::consts::LN_2 * (theta_deg / self.beamwidth_deg).powi(2)).exp();
        self.boresight_gain_dbi + linear_to_db(g)
    }
}

/// Four colors for the odd-r hexagonal layout of [`GaussianPattern::hex_grid`].
pub fn hex_grid_colors(rows: usize, cols: usize) -> Vec<usize> {
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (c % 2) + 2 * (r % 2)))
        .collect()
}

/// Gains measured or computed elsewhere, one row per user.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredGains {
    pub gains_dbi: DMatrix<f64>,
    pub slant_range_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BeamPattern {
    Gaussian(GaussianPattern),
    Measured(MeasuredGains),
}

impl BeamPattern {
    pub fn n_beams(&self) -> usize {
        match self {
            BeamPattern::Gaussian(p) => p.centers.len(),
            BeamPattern::Measured(m) => m.gains_dbi.ncols(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub offset_deg: [f64; 2],
    pub slant_range_m: f64,
    pub beam: usize,
    /// Row of a measured gain matrix, when the pattern is measured.
    pub pattern_row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserGeometry {
    pub users: Vec<User>,
}

impl UserGeometry {
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn users_of_beam(&self, beam: usize) -> Vec<usize> {
        (0..self.users.len()).filter(|&i| self.users[i].beam == beam).collect()
    }
}

/// GEO slant range to a point seen `eta_deg` off nadir.
pub fn slant_range(eta_deg: f64) -> f64 {
    let eta = eta_deg.to_radians();
    let rs = GEO_RADIUS_M;
    let re = EARTH_RADIUS_M;
    let disc = re * re - rs * rs * eta.sin().powi(2);
    if disc < 0.0 {
        return f64::NAN;
    }
    rs * eta.cos() - disc.sqrt()
}

/// Drops `per_beam` users uniformly over every beam's coverage disc.
///
/// For measured patterns the users are drawn without replacement from the
/// rows whose strongest feed is the beam in question.
pub fn drop_users(pattern: &BeamPattern, per_beam: usize, rng_seed: u64) -> Result<UserGeometry> {
    if pattern.n_beams() == 0 {
        return Err(Error::EmptyPattern);
    }
    if per_beam == 0 {
        return Err(Error::Parameter("per_beam must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut users = Vec::with_capacity(per_beam * pattern.n_beams());
    match pattern {
        BeamPattern::Gaussian(p) => {
            for (k, c) in p.centers.iter().enumerate() {
                for _ in 0..per_beam {
                    let r = p.coverage_radius_deg * rng.random::<f64>().sqrt();
                    let phi = std::f64::consts::TAU * rng.random::<f64>();
                    let offset = [c[0] + r * phi.cos(), c[1] + r * phi.sin()];
                    let eta = (offset[0].powi(2) + (offset[1] + p.nadir_offset_deg).powi(2)).sqrt();
                    users.push(User {
                        offset_deg: offset,
                        slant_range_m: slant_range(eta),
                        beam: k,
                        pattern_row: None,
                    });
                }
            }
        }
        BeamPattern::Measured(m) => {
            for k in 0..m.gains_dbi.ncols() {
                let mut rows: Vec<usize> = (0..m.gains_dbi.nrows())
                    .filter(|&i| strongest_feed(&m.gains_dbi, i) == k)
                    .collect();
                if rows.len() < per_beam {
                    return Err(Error::InsufficientUsers {
                        needed: per_beam,
                        available: rows.len(),
                    });
                }
                // Partial Fisher-Yates.
                for j in 0..per_beam {
                    let pick = rng.random_range(j..rows.len());
                    rows.swap(j, pick);
                }
                for &row in &rows[..per_beam] {
                    users.push(User {
                        offset_deg: [0.0, 0.0],
                        slant_range_m: m.slant_range_m,
                        beam: k,
                        pattern_row: Some(row),
                    });
                }
            }
        }
    }
    Ok(UserGeometry { users })
}

fn strongest_feed(g: &DMatrix<f64>, row: usize) -> usize {
    let mut best = 0;
    for j in 1..g.ncols() {
        if g[(row, j)] > g[(row, best)] {
            best = j;
        }
    }
    best
}

/// Gain matrix in dBi, users × feeds.
pub fn synth_beam_gains(geometry: &UserGeometry, pattern: &BeamPattern) -> Result<DMatrix<f64>> {
    if geometry.is_empty() {
        return Err(Error::Empty);
    }
    let n_t = pattern.n_beams();
    match pattern {
        BeamPattern::Gaussian(p) => Ok(DMatrix::from_fn(geometry.len(), n_t, |i, j| {
            let u = &geometry.users[i].offset_deg;
            let c = &p.centers[j];
            let theta = ((u[0] - c[0]).powi(2) + (u[1] - c[1]).powi(2)).sqrt();
            p.gain_dbi(theta)
        })),
        BeamPattern::Measured(m) => {
            let mut out = DMatrix::zeros(geometry.len(), n_t);
            for (i, user) in geometry.users.iter().enumerate() {
                let row = user.pattern_row.ok_or_else(|| {
                    Error::Parameter(format!("user {i} has no row in the measured pattern"))
                })?;
                if row >= m.gains_dbi.nrows() {
                    return Err(Error::Dimension(format!("pattern row {row} out of range")));
                }
                out.set_row(i, &m.gains_dbi.row(row));
            }
            Ok(out)
        }
    }
}

/// `b_ij = sqrt(G_R G_ij) / (4π d_i/λ · sqrt(κ T_cs B_u))`, gains linear.
pub fn link_budget_matrix(
    gains_dbi: &DMatrix<f64>,
    params: &LinkBudgetParams,
    geometry: &UserGeometry,
) -> Result<DMatrix<f64>> {
    if gains_dbi.nrows() != geometry.len() {
        return Err(Error::Dimension(format!(
            "{} gain rows for {} users",
            gains_dbi.nrows(),
            geometry.len()
        )));
    }
    if !(params.clear_sky_temp > 0.0) || !(params.user_bandwidth > 0.0) {
        return Err(Error::Parameter("T_cs and B_u must be positive".into()));
    }
    let lambda = params.wavelength();
    let noise = (params.boltzmann * params.clear_sky_temp * params.user_bandwidth).sqrt();
    let g_r = db_to_linear(params.rx_antenna_gain_dbi);
    let mut b = DMatrix::zeros(gains_dbi.nrows(), gains_dbi.ncols());
    for (i, user) in geometry.users.iter().enumerate() {
        let d = user.slant_range_m;
        if !(d > 0.0) {
            return Err(Error::Parameter(format!("slant range of user {i} is {d}")));
        }
        let path = 4.0 * std::f64::consts::PI * d / lambda;
        for j in 0..gains_dbi.ncols() {
            b[(i, j)] = (g_r * db_to_linear(gains_dbi[(i, j)])).sqrt() / (path * noise);
        }
    }
    Ok(b)
}

/// Diagonal of `Φ`: `e^{jφ}` with `φ` uniform on `[0, 2π)`.
pub fn phase_matrix(n_users: usize, rng_seed: u64) -> Result<DVector<Complex64>> {
    if n_users == 0 {
        return Err(Error::Parameter("n_users must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(DVector::from_fn(n_users, |_, _| {
        Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub h: CMat,
    pub b: DMatrix<f64>,
    /// Diagonal of `Φ`.
    pub phases: DVector<Complex64>,
}

impl ChannelMatrix {
    pub fn phase_matrix_dense(&self) -> CMat {
        CMat::from_diagonal(&self.phases)
    }
}

pub fn compose_channel(phases: &DVector<Complex64>, b: &DMatrix<f64>) -> Result<ChannelMatrix> {
    if phases.len() != b.nrows() {
        return Err(Error::Dimension(format!(
            "{} phases for {} channel rows",
            phases.len(),
            b.nrows()
        )));
    }
    let h = CMat::from_fn(b.nrows(), b.ncols(), |i, j| phases[i] * b[(i, j)]);
    Ok(ChannelMatrix {
        h,
        b: b.clone(),
        phases: phases.clone(),
    })
}
