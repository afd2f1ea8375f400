//! `hybrid-ee` command line: single solves, sweeps, oracle checks and channel replays.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybrid_ee::channel::{read_channel_dump, write_channel_dump};
use hybrid_ee::{sample_channels, ChannelRealization, OracleGrid};
use hybrid_ee_sim::check::oracle_check;
use hybrid_ee_sim::config::{parse_modes, parse_schemes, SimConfig};
use hybrid_ee_sim::output::{emit_outputs, write_results_csv, OutputFormat};
use hybrid_ee_sim::sweep::{run_sweep, solve_realization, summarize, ResultRow, SummaryRow};
use hybrid_ee_sim::{exit, SimError};

#[derive(Parser)]
#[command(
    name = "hybrid-ee",
    version,
    about = "Energy-efficient transmission for hybrid arrays with non-ideal amplifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel realization and print the allocations.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Trial index of the realization to draw.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Also write the rows to `<out>/results.csv`.
        #[arg(long)]
        csv: bool,
        /// Write the realization to this CSV file.
        #[arg(long, value_name = "PATH")]
        dump_channels: Option<PathBuf>,
    },
    /// Run the configured Monte Carlo sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Write the realizations of the first swept value to this CSV file.
        #[arg(long, value_name = "PATH")]
        dump_channels: Option<PathBuf>,
    },
    /// Compare the solver with the brute-force oracle on small instances.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        instances: u64,
    },
    /// Run the configured sweep on the realizations stored in a channel-dump CSV.
    Replay {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        channels: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key = value scenario file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// coherent, noncoherent or both.
    #[arg(long)]
    mode: Option<String>,
    /// proposed, fixed, uniform-duration, water-filling or all.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// csv, svg or both.
    #[arg(long, default_value = "both")]
    format: String,
}

impl Common {
    fn load(&self) -> Result<SimConfig, SimError> {
        let mut cfg = match &self.config {
            Some(p) => SimConfig::from_path(p)?,
            None => SimConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.sweep.seed = s;
        }
        if let Some(n) = self.trials {
            cfg.sweep.trials = n;
        }
        if let Some(m) = &self.mode {
            cfg.sweep.modes = parse_modes(m)?;
        }
        if let Some(s) = &self.scheme {
            cfg.sweep.schemes = parse_schemes(s)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn format(&self) -> Result<OutputFormat, SimError> {
        self.format.parse()
    }
}

fn io_err(path: &Path, e: std::io::Error) -> SimError {
    SimError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn dump(path: &Path, reals: &[(u64, ChannelRealization)]) -> Result<(), SimError> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    write_channel_dump(BufWriter::new(f), reals)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>, scale: f64, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{:.*}", prec, x * scale))
}

fn print_rows(rows: &[ResultRow]) {
    println!(
        "{:<12} {:<17} {:>6} {:>10} {:>4} {:>12} {:>12}  powers (W)",
        "mode", "scheme", "trial", "t* (ms)", "m*", "energy (mJ)", "EE (Mbit/J)"
    );
    for r in rows {
        let powers: Vec<String> = r.powers.iter().map(|p| format!("{p:.3e}")).collect();
        println!(
            "{:<12} {:<17} {:>6} {:>10} {:>4} {:>12} {:>12}  {}",
            r.mode.as_str(),
            r.scheme.as_str(),
            r.trial,
            fmt_opt(r.t_star, 1e3, 4),
            r.m_star.map_or_else(|| "-".into(), |m| m.to_string()),
            fmt_opt(r.energy, 1e3, 4),
            fmt_opt(r.ee, 1e-6, 4),
            if r.feasible {
                powers.join(" ")
            } else {
                "infeasible".into()
            }
        );
    }
}

fn print_summary(rows: &[SummaryRow], param: &str) {
    println!(
        "{:<12} {:<17} {:>10} {:>9} {:>22} {:>18} {:>8}",
        "mode", "scheme", param, "feasible", "mean EE (Mbit/J) ±95%", "mean t* (ms)", "mean m*"
    );
    for s in rows {
        let ee = match (s.mean_ee, s.ee_half_width) {
            (Some(m), Some(h)) => format!("{:.4} ± {:.4}", m * 1e-6, h * 1e-6),
            _ => "-".into(),
        };
        println!(
            "{:<12} {:<17} {:>10} {:>9} {:>22} {:>18} {:>8}",
            s.mode.as_str(),
            s.scheme.as_str(),
            s.value,
            format!("{}/{}", s.feasible, s.trials),
            ee,
            fmt_opt(s.mean_t_star, 1e3, 4),
            fmt_opt(s.mean_m_star, 1.0, 2)
        );
    }
}

fn run(cli: Cli) -> Result<i32, SimError> {
    match cli.command {
        Command::Solve {
            common,
            trial,
            csv,
            dump_channels,
        } => {
            let cfg = common.load()?;
            let sc = &cfg.scenario;
            let m = sc.models(cfg.sweep.modes[0])?;
            let real = sample_channels(&m.system, &m.path_loss, cfg.sweep.seed, trial);
            if let Some(p) = &dump_channels {
                dump(p, &[(trial, real.clone())])?;
            }
            let rows = solve_realization(
                &real,
                sc,
                &cfg.sweep.modes,
                &cfg.sweep.schemes,
                sc.rate_mbps,
                trial,
            )?;
            print_rows(&rows);
            if csv {
                std::fs::create_dir_all(&common.out).map_err(|e| io_err(&common.out, e))?;
                let p = common.out.join("results.csv");
                let f = File::create(&p).map_err(|e| io_err(&p, e))?;
                write_results_csv(BufWriter::new(f), &rows)?;
            }
            if rows.iter().any(|r| !r.feasible) {
                eprintln!(
                    "error: rate target of {} Mbps cannot be met within the slot",
                    sc.rate_mbps
                );
                return Ok(exit::INFEASIBLE);
            }
            Ok(exit::OK)
        }
        Command::Sweep {
            common,
            dump_channels,
        } => {
            let cfg = common.load()?;
            let format = common.format()?;
            if let Some(p) = &dump_channels {
                let sc = cfg.scenario.with_value(
                    cfg.sweep.parameter,
                    cfg.sweep.values[0],
                    cfg.sweep.fixed_total_bits,
                )?;
                let m = sc.models(cfg.sweep.modes[0])?;
                let reals: Vec<_> = (0..cfg.sweep.trials as u64)
                    .map(|t| {
                        (
                            t,
                            sample_channels(&m.system, &m.path_loss, cfg.sweep.seed, t),
                        )
                    })
                    .collect();
                dump(p, &reals)?;
            }
            let rows = run_sweep(&cfg.sweep, &cfg.scenario)?;
            let summary = summarize(&rows);
            print_summary(&summary, cfg.sweep.parameter.as_str());
            for p in emit_outputs(&rows, &summary, &common.out, format, cfg.sweep.parameter)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(exit::OK)
        }
        Command::OracleCheck { common, instances } => {
            let cfg = common.load()?;
            let out = oracle_check(
                &cfg.scenario,
                &cfg.sweep.modes,
                instances,
                cfg.sweep.seed,
                &OracleGrid::default(),
            )?;
            let mut failed = 0;
            for o in &out {
                println!(
                    "{:<4} instance {:>3} {:<12} r_dl {:>7.3} Mbps  solver {:>12} mJ  oracle {:>12} mJ  {}",
                    if o.passed { "ok" } else { "FAIL" },
                    o.instance,
                    o.mode.as_str(),
                    o.rate_mbps,
                    fmt_opt(o.solver_energy, 1e3, 6),
                    fmt_opt(o.oracle_energy, 1e3, 6),
                    o.note
                );
                failed += usize::from(!o.passed);
            }
            println!("{} of {} comparisons passed", out.len() - failed, out.len());
            Ok(if failed == 0 {
                exit::OK
            } else {
                exit::ORACLE_VIOLATION
            })
        }
        Command::Replay { common, channels } => {
            let cfg = common.load()?;
            let format = common.format()?;
            let f = File::open(&channels).map_err(|e| io_err(&channels, e))?;
            let reals = read_channel_dump(std::io::BufReader::new(f))?;
            let sweep = &cfg.sweep;
            // one unit per (value, stored realization), ordered like a sweep
            let mut units = Vec::with_capacity(sweep.values.len() * reals.len());
            for &v in &sweep.values {
                let sc = cfg
                    .scenario
                    .with_value(sweep.parameter, v, sweep.fixed_total_bits)?;
                for (trial, real) in &reals {
                    let sc = hybrid_ee_sim::Scenario {
                        num_subarrays: real.num_subarrays,
                        antennas_per_subarray: real.antennas_per_subarray,
                        ..sc.clone()
                    };
                    units.push(solve_realization(
                        real,
                        &sc,
                        &sweep.modes,
                        &sweep.schemes,
                        v,
                        *trial,
                    )?);
                }
            }
            let n = sweep.modes.len() * sweep.schemes.len();
            let rows: Vec<ResultRow> = (0..n)
                .flat_map(|k| units.iter().map(move |u| u[k].clone()))
                .collect();
            let summary = summarize(&rows);
            print_summary(&summary, sweep.parameter.as_str());
            for p in emit_outputs(&rows, &summary, &common.out, format, sweep.parameter)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
