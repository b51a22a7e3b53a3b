//! Plot-data files for an [`ExperimentReport`].

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::cdf::empirical_cdf;
use super::experiment::ExperimentReport;
use super::io::fmt_f64;
use crate::channel::linear_to_db;
use crate::Result;

#[derive(Serialize)]
struct ConvergenceLine {
    total_power_w: f64,
    drop: usize,
    round: usize,
    iteration: usize,
    objective: f64,
    r_star: f64,
    accepted: bool,
}

/// `report.csv`: one row per power point.
pub fn report_csv(r: &ExperimentReport) -> String {
    let mut s = String::from(
        "algorithm,scheduler,rho,total_power_w,drops,rounds,skipped_rounds,r_avg_gbps,outage_fraction\n",
    );
    for p in &r.points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm.name(),
            r.scheduler.name(),
            r.rho,
            fmt_f64(p.total_power_w),
            r.drops,
            p.rounds.len(),
            p.skipped.len(),
            fmt_f64(p.r_avg_gbps),
            fmt_f64(p.outage_fraction)
        );
    }
    s
}

/// `rounds.csv`: per-round average throughput.
pub fn rounds_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("total_power_w,drop,round,r_avg_gbps\n");
    for p in &r.points {
        for o in &p.rounds {
            let _ = writeln!(s, "{},{},{},{}", fmt_f64(p.total_power_w), o.drop, o.round, fmt_f64(o.r_avg_gbps));
        }
    }
    s
}

/// `per_user.csv`.
pub fn per_user_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("total_power_w,drop,round,group_id,user_id,sinr_db,rate_gbps\n");
    for (i, p) in r.points.iter().enumerate() {
        for (o, u) in r.users(i) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                fmt_f64(p.total_power_w),
                o.drop,
                o.round,
                u.group,
                u.user,
                fmt_f64(linear_to_db(u.sinr)),
                fmt_f64(u.rate_gbps)
            );
        }
    }
    s
}

fn cdf_csv(r: &ExperimentReport, column: &str, value: impl Fn(f64, f64) -> f64) -> Result<String> {
    let mut s = format!("total_power_w,{column},probability\n");
    for (i, p) in r.points.iter().enumerate() {
        let v: Vec<f64> = r.users(i).map(|(_, u)| value(u.sinr, u.rate_gbps)).collect();
        if v.is_empty() {
            continue;
        }
        for (x, q) in empirical_cdf(&v)? {
            let _ = writeln!(s, "{},{},{}", fmt_f64(p.total_power_w), fmt_f64(x), fmt_f64(q));
        }
    }
    Ok(s)
}

/// `sinr_cdf.csv`, in dB.
pub fn sinr_cdf_csv(r: &ExperimentReport) -> Result<String> {
    cdf_csv(r, "sinr_db", |s, _| linear_to_db(s))
}

/// `rate_cdf.csv`, in Gbps.
pub fn rate_cdf_csv(r: &ExperimentReport) -> Result<String> {
    cdf_csv(r, "rate_gbps", |_, rate| rate)
}

/// `convergence.jsonl`: one line per logged iteration.
pub fn convergence_jsonl(r: &ExperimentReport) -> Result<String> {
    let mut s = String::new();
    for p in &r.points {
        for o in &p.rounds {
            for l in &o.trace {
                let line = ConvergenceLine {
                    total_power_w: p.total_power_w,
                    drop: o.drop,
                    round: o.round,
                    iteration: l.iteration,
                    objective: l.objective,
                    r_star: l.r_star,
                    accepted: l.accepted,
                };
                s.push_str(&serde_json::to_string(&line).map_err(|e| crate::Error::Parse(e.to_string()))?);
                s.push('\n');
            }
        }
    }
    Ok(s)
}

/// Writes every output file into `dir`, creating it if needed.
pub fn write_outputs(r: &ExperimentReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.csv"), report_csv(r))?;
    std::fs::write(dir.join("rounds.csv"), rounds_csv(r))?;
    std::fs::write(dir.join("per_user.csv"), per_user_csv(r))?;
    std::fs::write(dir.join("sinr_cdf.csv"), sinr_cdf_csv(r)?)?;
    std::fs::write(dir.join("rate_cdf.csv"), rate_cdf_csv(r)?)?;
    std::fs::write(dir.join("convergence.jsonl"), convergence_jsonl(r)?)?;
    Ok(())
}
