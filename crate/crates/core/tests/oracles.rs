mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satprecode::channel::{
    db_to_linear, link_budget_matrix, phase_matrix, slant_range, LinkBudgetParams, User, UserGeometry,
    EARTH_RADIUS_M, GEO_RADIUS_M,
};
use satprecode::modcod::{average_user_throughput, ModcodTable, ThroughputParams};
use satprecode::precoding::{
    max_sum_rate, max_throughput_modcod, pac_ratio, project_pac, sinr, solve_qos, subgradient_step, sum_rate,
    utility, Frame, PrecodingMatrix, SolverConfig,
};
use satprecode::scheduler::{schedule_multicast_aware, schedule_random};
use satprecode::{CMat, CVec, GroupPartition};

#[test]
fn link_budget_matches_decibel_sum() {
    let params = LinkBudgetParams::default();
    let d = 37_000_000.0;
    let geo = UserGeometry {
        users: vec![User {
            offset_deg: [0.0, 0.0],
            slant_range_m: d,
            beam: 0,
            pattern_row: None,
        }],
    };
    let gains = DMatrix::from_row_slice(1, 3, &[52.0, 30.5, -3.0]);
    let b = link_budget_matrix(&gains, &params, &geo).unwrap();
    let lambda = 299_792_458.0 / 20e9;
    let fspl_db = 20.0 * (4.0 * std::f64::consts::PI * d / lambda).log10();
    let noise_dbw = 10.0 * (1.380649e-23f64 * 235.3 * 500e6).log10();
    for j in 0..3 {
        let snr_db = 40.7 + gains[(0, j)] - fspl_db - noise_dbw;
        let expect = 10f64.powf(snr_db / 10.0);
        let got = b[(0, j)].powi(2);
        assert!((got - expect).abs() <= 1e-12 * expect, "feed {j}: {got} vs {expect}");
    }
}

#[test]
fn slant_range_matches_elevation_geometry() {
    for eta in [0.0f64, 1.0, 4.5, 6.0, 8.0] {
        let eta_r = eta.to_radians();
        // Elevation from the sine rule, then the Earth-central angle.
        let elev = (GEO_RADIUS_M * eta_r.sin() / EARTH_RADIUS_M).acos();
        let psi = std::f64::consts::FRAC_PI_2 - eta_r - elev;
        let expect = (EARTH_RADIUS_M.powi(2) + GEO_RADIUS_M.powi(2)
            - 2.0 * EARTH_RADIUS_M * GEO_RADIUS_M * psi.cos())
        .sqrt();
        let got = slant_range(eta);
        assert!((got - expect).abs() <= 1e-6, "eta {eta}: {got} vs {expect}");
    }
}

#[test]
fn throughput_at_lowest_modcod() {
    let table = ModcodTable::dvb_s2x();
    let s = db_to_linear(table.lowest_threshold_db());
    let r = average_user_throughput(&[s], &GroupPartition::consecutive(1, 1), &table, &ThroughputParams::default());
    let expect = 2.0 * 500e6 / 1.2 * table.rows()[0].efficiency / 1e9;
    assert!((r - expect).abs() < 1e-12);
    assert!((r - 0.3623).abs() < 1e-4, "{r}");
}

/// Distance-squared minimizer over `{p ≥ 0 : Σ_k p_k c_nk ≤ P_n}` for two
/// groups. For fixed `p_0` the best `p_1` is a clamp; the outer problem is
/// convex in `p_0`, so a grid followed by ternary search finds it.
fn project_two(x: [f64; 2], c: &[[f64; 2]], p_ant: &[f64]) -> [f64; 2] {
    let p0_max = c
        .iter()
        .zip(p_ant)
        .filter(|(r, _)| r[0] > 0.0)
        .map(|(r, p)| p / r[0])
        .fold(f64::INFINITY, f64::min);
    let inner = |p0: f64| -> (f64, f64) {
        let cap = c
            .iter()
            .zip(p_ant)
            .filter(|(r, _)| r[1] > 0.0)
            .map(|(r, p)| (p - p0 * r[0]) / r[1])
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let p1 = x[1].clamp(0.0, cap);
        (p1, (p0 - x[0]).powi(2) + (p1 - x[1]).powi(2))
    };
    let steps = 2000;
    let at = |s: usize| p0_max * s as f64 / steps as f64;
    let best = (0..=steps).min_by(|&a, &b| inner(at(a)).1.total_cmp(&inner(at(b)).1)).unwrap();
    let mut lo = at(best.saturating_sub(1));
    let mut hi = at((best + 1).min(steps));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if inner(m1).1 <= inner(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let p0 = 0.5 * (lo + hi);
    [p0, inner(p0).0]
}

#[test]
fn pac_projection_matches_nested_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for k in 0..40 {
        let n_t = 2 + k % 3;
        let v = CMat::from_fn(n_t, 2, |_, _| cn(&mut rng));
        let v = CMat::from_columns(&[v.column(0).normalize(), v.column(1).normalize()]);
        let p_ant: Vec<f64> = (0..n_t).map(|_| rng.random_range(0.5..2.0)).collect();
        let x = [rng.random_range(-1.0..6.0), rng.random_range(-1.0..6.0)];
        let c: Vec<[f64; 2]> = (0..n_t).map(|n| [v[(n, 0)].norm_sqr(), v[(n, 1)].norm_sqr()]).collect();
        let expect = project_two(x, &c, &p_ant);
        let got = project_pac(&x, &v, &p_ant).unwrap();
        for j in 0..2 {
            assert!((got[j] - expect[j]).abs() <= 1e-6, "instance {k}: {got:?} vs {expect:?}");
        }
    }
}

#[test]
fn subgradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 20 {
        let n_t = rng.random_range(2..5);
        let rho = rng.random_range(1..3);
        let f = iid_frame(rng.random(), n_t, rho, 1.0);
        let v = CMat::from_fn(n_t, n_t, |_, _| cn(&mut rng));
        let v = CMat::from_columns(&v.column_iter().map(|c| c.normalize()).collect::<Vec<_>>());
        let s: Vec<f64> = (0..n_t).map(|_| rng.random_range(-1.0..1.5)).collect();
        // Skip points where a group's worst user is not unique.
        let w = PrecodingMatrix::from_parts(&v, &s.iter().map(|x| x.exp()).collect::<Vec<_>>());
        let sv = sinr(&w, &f);
        let tied = f.partition.groups().iter().any(|g| {
            let mut x: Vec<f64> = g.iter().map(|&i| sv[i]).collect();
            x.sort_by(f64::total_cmp);
            x.len() > 1 && x[1] < x[0] * 1.01
        });
        if tied {
            continue;
        }
        let r = subgradient_step(&s, &v, &f);
        let h = 1e-6;
        for j in 0..n_t {
            let mut up = s.clone();
            up[j] += h;
            let mut dn = s.clone();
            dn[j] -= h;
            let fd = (utility(&up, &v, &f) - utility(&dn, &v, &f)) / (2.0 * h);
            assert!((-r[j] - fd).abs() <= 1e-5, "coordinate {j}: {} vs {fd}", -r[j]);
        }
        checked += 1;
    }
}

#[test]
fn qos_matches_direction_grid() {
    for seed in 0..4 {
        let rho = 1 + seed as usize % 2;
        let f = desk_frame(100 + seed, 2, rho);
        let targets = vec![2.0; f.h.nrows()];
        let oracle = qos_grid_2x2(&f, &targets, 16, 32);
        let q = solve_qos(&f, &targets, &SolverConfig::default()).unwrap();
        assert!((q.r_star - oracle).abs() <= 0.05 * oracle, "seed {seed}: {} vs {oracle}", q.r_star);
        assert!(q.sdr_lower_bound <= oracle * (1.0 + 1e-6));
    }
}

#[test]
fn sum_rate_matches_direction_grid() {
    for seed in 0..4 {
        let rho = 1 + seed as usize % 2;
        let f = desk_frame(200 + seed, 2, rho);
        let oracle = sum_rate_grid_2x2(&f, 16, 32, 32);
        let out = max_sum_rate(&f, &SolverConfig::default()).unwrap();
        assert!(pac_ratio(&out.w, &f.p_ant) <= 1.0 + 1e-6);
        let got = sum_rate(&sinr(&out.w, &f), &f);
        assert!((got - oracle).abs() <= 0.05 * oracle, "seed {seed}: {got} vs {oracle}");
    }
}

/// Best `f(t_0) + f(t_1)` over tier pairs the direction grid finds
/// feasible, walking the feasibility staircase.
fn best_tier_pair(f: &Frame, table: &ModcodTable) -> f64 {
    let feasible = |t0: usize, t1: usize| {
        let g = [db_to_linear(table.rows()[t0].threshold_db), db_to_linear(table.rows()[t1].threshold_db)];
        let targets: Vec<f64> = (0..f.h.nrows())
            .map(|i| g[usize::from(f.partition.group(1).contains(&i))])
            .collect();
        qos_grid_2x2(f, &targets, 12, 24) <= 1.0 + 1e-4
    };
    let n = table.len();
    let eff = |t: usize| table.rows()[t].efficiency;
    let mut best = f64::NEG_INFINITY;
    let mut t1 = 0;
    for t0 in (0..n).rev() {
        if !feasible(t0, t1) {
            continue;
        }
        while t1 + 1 < n && feasible(t0, t1 + 1) {
            t1 += 1;
        }
        best = best.max(eff(t0) + eff(t1));
    }
    best
}

#[test]
fn modcod_refinement_within_exhaustive_tier_search() {
    let table = ModcodTable::dvb_s2x();
    let gamma_min = db_to_linear(table.lowest_threshold_db());
    let step = table
        .rows()
        .windows(2)
        .map(|w| w[1].efficiency - w[0].efficiency)
        .fold(0.0, f64::max);
    for seed in 0..3 {
        let f = desk_frame(300 + seed, 2, 1 + seed as usize % 2);
        let oracle = best_tier_pair(&f, &table);
        let out = max_throughput_modcod(&f, &table, gamma_min, &SolverConfig::default()).unwrap();
        assert!((out.objective - oracle).abs() <= step + 1e-9, "seed {seed}: {} vs {oracle}", out.objective);
    }
}

/// Multicast-aware grouping restated from its definition, with distances
/// to the span of earlier seeds computed by least squares.
fn scheduler_by_definition(h: &CMat, n_groups: usize, rho: usize) -> Vec<Vec<usize>> {
    let rows: Vec<CVec> = (0..h.nrows()).map(|i| h.row(i).transpose()).collect();
    let dist = |x: &CVec, seeds: &[usize]| -> f64 {
        if seeds.is_empty() {
            return x.norm();
        }
        let s = CMat::from_columns(&seeds.iter().map(|&u| rows[u].clone()).collect::<Vec<_>>());
        let coef = (s.adjoint() * &s).lu().solve(&(s.adjoint() * x)).unwrap();
        (x - s * coef).norm()
    };
    let pick = |pool: &[usize], score: &dyn Fn(usize) -> f64| -> usize {
        let mut best = pool[0];
        for &u in pool {
            if score(u) > score(best) {
                best = u;
            }
        }
        best
    };
    let mut pool: Vec<usize> = (0..h.nrows()).collect();
    let mut seeds: Vec<usize> = Vec::new();
    for _ in 0..n_groups {
        let u = pick(&pool, &|u| dist(&rows[u], &seeds));
        pool.retain(|&x| x != u);
        seeds.push(u);
    }
    let mut groups: Vec<Vec<usize>> = seeds.iter().map(|&s| vec![s]).collect();
    for g in groups.iter_mut() {
        let r = rows[g[0]].clone();
        for _ in 1..rho {
            let u = pick(&pool, &|u| r.dotc(&rows[u]).norm() / r.norm());
            pool.retain(|&x| x != u);
            g.push(u);
        }
    }
    groups
}

#[test]
fn multicast_aware_scheduler_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n_groups = rng.random_range(1..5);
        let rho = rng.random_range(1..4);
        let n_users = n_groups * rho + rng.random_range(0..6);
        let h = CMat::from_fn(n_users, n_groups.max(2), |_, _| cn(&mut rng));
        let got = schedule_multicast_aware(&h, n_groups, rho).unwrap();
        assert_eq!(got.groups(), scheduler_by_definition(&h, n_groups, rho).as_slice());
    }
}

/// χ² critical value, 3 degrees of freedom, 0.1% significance.
const CHI2_3DF_999: f64 = 16.27;

#[test]
fn random_grouping_is_uniform() {
    let ids: Vec<usize> = (0..8).collect();
    let mut counts = [0usize; 4];
    let n = 10_000;
    for seed in 0..n {
        let p = schedule_random(&ids, 3, 2, seed).unwrap();
        let cell = p.groups().iter().position(|g| g.contains(&0)).unwrap_or(3);
        counts[cell] += 1;
    }
    let stat = chi_square(&counts, &[n as f64 / 4.0; 4]);
    assert!(stat < CHI2_3DF_999, "{counts:?}, χ² = {stat}");
}

#[test]
fn phases_are_uniform() {
    let n = 100_000;
    let z = phase_matrix(n, 17).unwrap();
    let mean: Complex64 = z.iter().sum::<Complex64>() / n as f64;
    let se = (0.5 / n as f64).sqrt();
    assert!(mean.re.abs() < 5.0 * se && mean.im.abs() < 5.0 * se, "{mean}");
    assert!(z.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
    let mut counts = [0usize; 4];
    for x in z.iter() {
        let quadrant = (x.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::FRAC_PI_2) as usize;
        counts[quadrant.min(3)] += 1;
    }
    let stat = chi_square(&counts, &[n as f64 / 4.0; 4]);
    assert!(stat < CHI2_3DF_999, "{counts:?}, χ² = {stat}");
}
