use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satprecode::channel::{db_to_linear, linear_to_db, LinkBudgetParams};
use satprecode::modcod::{average_user_throughput, ModcodTable, ThroughputParams};
use satprecode::precoding::{pac_ratio, sinr, Frame};
use satprecode::scheduler::{multicast_aware_rounds, schedule_random};
use satprecode::sim::io::{read_channel_csv, read_partition_csv, write_partition_csv, write_precoder_csv};
use satprecode::sim::output::report_csv;
use satprecode::sim::{precode_frame, run_experiment, write_outputs, Algorithm, RunConfig, SchedulerKind};
use satprecode::{Error, GroupPartition, Result};

#[derive(Parser)]
#[command(name = "satprecode", version, about = "Multigroup multicast precoding for multibeam satellites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::parse(&read(p)?)?,
            None => RunConfig::default(),
        };
        for kv in &self.overrides {
            cfg.apply_override(kv)?;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full Monte-Carlo experiment.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: u64,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory, overriding `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-color reference system over the same drops.
    Baseline {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Precode every round of a partition for a channel CSV.
    Precode {
        #[command(flatten)]
        config: ConfigArgs,
        /// `user_id,feed_id,re,im`, normalized to unit noise.
        #[arg(long)]
        channel: PathBuf,
        /// `round,group_id,user_id`.
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for `precoder_<round>.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition the users of a channel CSV into rounds.
    Schedule {
        #[arg(long)]
        channel: PathBuf,
        /// Groups per round; defaults to the number of feeds.
        #[arg(long)]
        groups: Option<usize>,
        #[arg(long)]
        rho: usize,
        #[arg(long, default_value = "multicast-aware")]
        scheduler: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a MODCOD table and list it.
    ValidateModcods {
        /// `threshold_db,spectral_efficiency_bps_hz`; the bundled table if absent.
        file: Option<PathBuf>,
    },
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn experiment(mut cfg: RunConfig, seed: u64, threads: Option<usize>, out: Option<PathBuf>) -> Result<()> {
    cfg.seed = Some(seed);
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    let report = pool(threads)?.install(|| run_experiment(&cfg))?;
    write_outputs(&report, &cfg.output_dir)?;
    print!("{}", report_csv(&report));
    eprintln!(
        "wrote {} in {:.1} s",
        cfg.output_dir.display(),
        report.wall_clock.as_secs_f64()
    );
    Ok(())
}

fn table_of(cfg: &RunConfig) -> Result<ModcodTable> {
    match &cfg.modcod_file {
        Some(p) => ModcodTable::from_csv(&read(p)?),
        None => Ok(ModcodTable::dvb_s2x()),
    }
}

fn precode(cfg: &RunConfig, channel: &Path, partition: &Path, seed: u64, out: &Path) -> Result<()> {
    if cfg.algorithm == Algorithm::Conventional {
        return Err(Error::Config("precode needs a precoding algorithm".into()));
    }
    let h = read_channel_csv(&read(channel)?)?;
    let rounds = read_partition_csv(&read(partition)?)?;
    let table = table_of(cfg)?;
    let link = LinkBudgetParams {
        total_power: cfg.power_sweep_w[0],
        ..cfg.link.clone()
    };
    let p_ant = link.per_antenna_limits(h.ncols());
    let params = ThroughputParams {
        user_bandwidth: link.user_bandwidth,
        rolloff: link.rolloff,
    };
    let solver = satprecode::precoding::SolverConfig {
        rng_seed: seed,
        ..cfg.solver.clone()
    };
    fs::create_dir_all(out)?;
    println!("round,r_avg_gbps,min_sinr_db,pac_ratio");
    for (r, part) in rounds.iter().enumerate() {
        let users: Vec<usize> = part.groups().concat();
        let mut next = 0;
        let local = GroupPartition::new(
            part.groups()
                .iter()
                .map(|g| {
                    next += g.len();
                    (next - g.len()..next).collect()
                })
                .collect(),
        )?;
        part.check_rows(h.nrows())?;
        let frame = Frame::new(h.select_rows(&users), local.clone(), p_ant.clone())?;
        let gamma_min = db_to_linear(cfg.gamma_min_db);
        let (w, _) = precode_frame(cfg.algorithm, &frame, &table, gamma_min, &solver, cfg.maxmin_rel_tol)
            .map_err(|e| Error::Round {
                drop: 0,
                round: r,
                source: Box::new(e),
            })?;
        fs::write(out.join(format!("precoder_{r}.csv")), write_precoder_csv(&w))?;
        let s = sinr(&w, &frame);
        let worst = s.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{r},{},{},{}",
            average_user_throughput(&s, &local, &table, &params),
            linear_to_db(worst),
            pac_ratio(&w, &p_ant)
        );
    }
    Ok(())
}

fn schedule(
    channel: &Path,
    groups: Option<usize>,
    rho: usize,
    scheduler: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let h = read_channel_csv(&read(channel)?)?;
    let g = groups.unwrap_or(h.ncols());
    let rounds = match scheduler.parse::<SchedulerKind>()? {
        SchedulerKind::MulticastAware => multicast_aware_rounds(&h, g, rho)?,
        SchedulerKind::Random => {
            let per_round = g * rho;
            let n_rounds = h.nrows() / per_round;
            if n_rounds == 0 {
                return Err(Error::InsufficientUsers {
                    needed: per_round,
                    available: h.nrows(),
                });
            }
            let ids: Vec<usize> = (0..h.nrows()).collect();
            let all = schedule_random(&ids, n_rounds * g, rho, seed)?;
            all.groups()
                .chunks(g)
                .map(|c| GroupPartition::new(c.to_vec()))
                .collect::<Result<_>>()?
        }
    };
    let text = write_partition_csv(&rounds);
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn validate_modcods(file: Option<&Path>) -> Result<()> {
    let table = match file {
        Some(p) => ModcodTable::from_csv(&read(p)?)?,
        None => ModcodTable::dvb_s2x(),
    };
    println!("threshold_db,spectral_efficiency_bps_hz");
    for r in table.rows() {
        println!("{},{}", r.threshold_db, r.efficiency);
    }
    eprintln!(
        "{} rows, lowest threshold {} dB",
        table.len(),
        table.lowest_threshold_db()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            threads,
            out,
        } => config.load().and_then(|cfg| experiment(cfg, seed, threads, out)),
        Command::Baseline {
            config,
            seed,
            threads,
            out,
        } => config.load().and_then(|cfg| {
            let cfg = RunConfig {
                algorithm: Algorithm::Conventional,
                ..cfg
            };
            experiment(cfg, seed, threads, out)
        }),
        Command::Precode {
            config,
            channel,
            partition,
            seed,
            out,
        } => config
            .load()
            .and_then(|cfg| precode(&cfg, &channel, &partition, seed, &out)),
        Command::Schedule {
            channel,
            groups,
            rho,
            scheduler,
            seed,
            out,
        } => schedule(&channel, groups, rho, &scheduler, seed, out.as_deref()),
        Command::ValidateModcods { file } => validate_modcods(file.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
