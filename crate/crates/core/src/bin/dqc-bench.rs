//! `dqc-bench run | sweep | verify`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use dqc_emu::harness::config::{normalize_theta, SweepConfig, DEFAULT_TIMEOUT};
use dqc_emu::harness::results::{format_sig9, HEADER};
use dqc_emu::harness::sweep::{fidelity_ok, run_point, run_sweep};
use dqc_emu::harness::verify::{run_checks, VerifyOptions};
use dqc_emu::{Error, Mode};

#[derive(Parser)]
#[command(name = "dqc-bench", version, about = "Distributed inverse-QFT emulator benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its result row.
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value = "telegate")]
        mode: Mode,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every point of a sweep configuration, appending to its CSV.
    Sweep {
        config: PathBuf,
        /// Per-run time limit in seconds.
        #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs())]
        timeout: u64,
    },
    /// Run the verification suite.
    Verify,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n\nUsage: dqc-bench run --n <N> --k <K> [--theta <T>] [--mode <MODE>] [--shots <S>] [--seed <SEED>]");
    ExitCode::from(2)
}

fn cmd_run(n: usize, k: usize, theta: f64, mode: Mode, shots: usize, seed: u64) -> ExitCode {
    if n == 0 || k == 0 {
        return usage_error("n and k must be positive");
    }
    if k > n {
        return usage_error(Error::KExceedsN { n, k });
    }
    if shots == 0 {
        return usage_error("shots must be at least 1");
    }
    if !(0.0..1.0).contains(&theta) {
        return usage_error(Error::InvalidTheta(theta));
    }
    let row = match run_point(n, k, normalize_theta(theta), mode, shots, seed, 0, None) {
        Ok(row) => row,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for (name, value) in HEADER.iter().zip(row.record()) {
        println!("{name:>20}  {value}");
    }
    println!();
    println!("{}", HEADER.join(","));
    println!("{}", row.csv_line());
    if fidelity_ok(&row) {
        ExitCode::SUCCESS
    } else {
        eprintln!("fidelity_exact {} below tolerance", format_sig9(row.fidelity_exact));
        ExitCode::FAILURE
    }
}

fn cmd_sweep(config: PathBuf, timeout: u64) -> ExitCode {
    let mut cfg = match SweepConfig::load(&config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    cfg.timeout = Duration::from_secs(timeout);
    let report = match run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let _ = report.write_summary(&mut std::io::stdout());
    println!("results: {}", cfg.resolved_output_path().display());
    for f in &report.failures {
        eprintln!("failed: {f}");
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_verify() -> ExitCode {
    let results = run_checks(&VerifyOptions::default());
    for r in &results {
        println!("{r}");
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match cli.command {
        Command::Run { n, k, theta, mode, shots, seed } => cmd_run(n, k, theta, mode, shots, seed),
        Command::Sweep { config, timeout } => cmd_sweep(config, timeout),
        Command::Verify => cmd_verify(),
    }
}
