//! Single runs and resumable parameter sweeps.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::fabric::PartitionPlan;
use crate::qft::{run_distributed, Mode, PhaseAngle, RunOptions};

use super::config::SweepConfig;
use super::results::{existing_keys, format_sig9, ResultRow, ResultWriter};

/// Exact fidelity below `1 - FIDELITY_TOL` is a failed run.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Runs one point and turns it into a result row.
#[allow(clippy::too_many_arguments)]
pub fn run_point(
    n: usize,
    k: usize,
    theta: f64,
    mode: Mode,
    shots: usize,
    seed: u64,
    repeat: usize,
    timeout: Option<Duration>,
) -> Result<ResultRow> {
    let plan = PartitionPlan::new(n, k)?;
    let phase = PhaseAngle::new(theta)?;
    let mut opts = RunOptions::new(shots, seed);
    opts.deadline = timeout.map(|t| Instant::now() + t);
    let out = run_distributed(&plan, phase, mode, &opts)?;
    Ok(ResultRow {
        n,
        k,
        theta,
        mode,
        seed,
        repeat,
        wall_time_seconds: out.metrics.wall_time_seconds,
        peak_state_bytes: out.metrics.peak_state_bytes,
        epr_count: out.metrics.epr_count,
        classical_msg_count: out.metrics.classical_msg_count,
        block_slots: out.metrics.block_slots,
        fidelity_exact: out.metrics.fidelity_vs_reference,
        fidelity_sampled: out.sampled_fidelity()?,
        modal_outcome: out.modal_outcome().unwrap_or(0),
    })
}

pub fn fidelity_ok(row: &ResultRow) -> bool {
    row.fidelity_exact >= 1.0 - FIDELITY_TOL
}

/// Outcome of [`run_sweep`].
#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    /// Rows produced by this invocation, in run order.
    pub new_rows: Vec<ResultRow>,
    /// Points already present in the output file.
    pub skipped: usize,
    /// Points that errored or had an exact fidelity below tolerance.
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Per `(n, k)` geometric-mean wall time and minimum exact fidelity
    /// over the new rows.
    pub fn summary(&self) -> BTreeMap<(usize, usize), (f64, f64)> {
        let mut acc: BTreeMap<(usize, usize), (f64, usize, f64)> = BTreeMap::new();
        for r in &self.new_rows {
            let e = acc.entry((r.n, r.k)).or_insert((0.0, 0, f64::INFINITY));
            e.0 += r.wall_time_seconds.max(1e-12).ln();
            e.1 += 1;
            e.2 = e.2.min(r.fidelity_exact);
        }
        acc.into_iter()
            .map(|(key, (log_sum, count, min_f))| (key, ((log_sum / count as f64).exp(), min_f)))
            .collect()
    }

    pub fn write_summary(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{:>4} {:>4} {:>16} {:>14}", "n", "k", "geomean_wall_s", "min_fidelity")?;
        for ((n, k), (wall, fid)) in self.summary() {
            writeln!(out, "{n:>4} {k:>4} {:>16} {:>14}", format_sig9(wall), format_sig9(fid))?;
        }
        writeln!(
            out,
            "{} new rows, {} skipped, {} failed",
            self.new_rows.len(),
            self.skipped,
            self.failures.len()
        )
    }
}

/// Runs every point of `cfg` not already in the output file, appending one
/// row per completed run. Run seeds are `cfg.seed + repeat`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let path = cfg.resolved_output_path();
    let done = existing_keys(&path)?;
    let mut writer = ResultWriter::open(&path)?;
    let mut report = SweepReport::default();

    for &n in &cfg.num_qubits {
        for &k in &cfg.nodes {
            if k > n {
                log::info!("skipping n = {n}, k = {k}: k exceeds n");
                continue;
            }
            for &theta in &cfg.theta {
                for &mode in &cfg.modes {
                    for repeat in 0..cfg.repeats {
                        let seed = cfg.seed + repeat as u64;
                        let key = (n, k, format_sig9(theta), mode.to_string(), seed, repeat);
                        if done.contains(&key) {
                            report.skipped += 1;
                            continue;
                        }
                        let label = format!("n={n} k={k} theta={} mode={mode} repeat={repeat}", format_sig9(theta));
                        log::debug!("running {label}");
                        match run_point(n, k, theta, mode, cfg.shots, seed, repeat, Some(cfg.timeout)) {
                            Ok(row) => {
                                writer.append(&row)?;
                                if !fidelity_ok(&row) {
                                    log::error!("{label}: fidelity_exact {}", row.fidelity_exact);
                                    report.failures.push(format!("{label}: fidelity_exact {}", row.fidelity_exact));
                                }
                                report.new_rows.push(row);
                            }
                            Err(e) => {
                                log::error!("{label}: {e}");
                                report.failures.push(format!("{label}: {e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
