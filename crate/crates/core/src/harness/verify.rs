//! Verification suite: structural, protocol and end-to-end checks.
//!
//! [`VerifyOptions`] can inject faults into the run or rewrite the schedule
//! before the structural check, which is how the suite's own sensitivity is
//! tested.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fabric::{Fabric, FabricConfig, FaultInjection, PartitionPlan};
use crate::metrics::{classical_fidelity, epr_budget, naive_epr_budget};
use crate::qft::run::{output_distribution, reference_state};
use crate::qft::{build_schedule, gate_multiset, inverse_qft_gates, run_distributed, semiclassical_exact_distribution};
use crate::qft::{DistributedSchedule, Mode, PhaseAngle, RunOptions};
use crate::statevector::{Amplitude, Gate, StateVector};
use crate::telegate::CatHandle;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:<24} {}", self.name, self.detail)
    }
}

#[derive(Clone, Default)]
pub struct VerifyOptions {
    pub faults: FaultInjection,
    /// Applied to every schedule before the gate-multiset check.
    pub schedule_mutation: Option<fn(&mut DistributedSchedule)>,
    /// Largest register in the equivalence sweep; 12 when zero.
    pub max_n: usize,
}

impl VerifyOptions {
    fn max_n(&self) -> usize {
        if self.max_n == 0 {
            12
        } else {
            self.max_n
        }
    }
}

fn check(name: &'static str, outcome: Result<Option<String>>, ok_detail: String) -> CheckResult {
    match outcome {
        Ok(None) => CheckResult { name, passed: true, detail: ok_detail },
        Ok(Some(why)) => CheckResult { name, passed: false, detail: why },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Flattened schedule against the monolithic inverse QFT, as gate multisets,
/// for every `n <= 12` and `k <= min(n, 8)`.
pub fn check_gate_multiset(mutation: Option<fn(&mut DistributedSchedule)>) -> CheckResult {
    let mut cases = 0;
    let outcome = (|| {
        for n in 1..=12 {
            let reference = gate_multiset(&inverse_qft_gates(&(0..n).collect::<Vec<_>>()));
            for k in 1..=n.min(8) {
                let mut schedule = build_schedule(&PartitionPlan::new(n, k)?);
                if let Some(m) = mutation {
                    m(&mut schedule);
                }
                cases += 1;
                if gate_multiset(&schedule.flatten()) != reference {
                    return Ok(Some(format!("multiset differs at n={n} k={k}")));
                }
            }
        }
        Ok(None)
    })();
    check("gate_multiset", outcome, format!("{cases} partitions"))
}

fn random_state(n: usize, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| Amplitude::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Forces each of the four measurement outcome pairs of one cat session on a
/// 3-qubit register split over two nodes, and compares with direct gates.
pub fn check_telegate_branches(faults: FaultInjection) -> CheckResult {
    let phases = [PI / 4.0, -PI / 8.0];
    let outcome = (|| {
        for state_seed in 0..4 {
            let start = random_state(3, state_seed)?;
            let mut direct = start.clone();
            for (j, &phi) in phases.iter().enumerate() {
                direct.apply(&Gate::CP(0, j + 1, phi))?;
            }
            for branch in 0..4u8 {
                let config = FabricConfig { faults, ..FabricConfig::default() };
                let mut f = Fabric::new(PartitionPlan::new(3, 2)?, config, ChaCha8Rng::seed_from_u64(0))?;
                f.load_logical_state(&start)?;
                f.force_outcomes([branch & 1, branch >> 1]);
                let control = f.plan().logical(0, 0)?;
                let mut cat = CatHandle::entangle(&mut f, control, 1)?;
                for (j, &phi) in phases.iter().enumerate() {
                    let t = f.plan().logical(1, j)?;
                    cat.controlled_phase(&mut f, t, phi)?;
                }
                cat.disentangle(&mut f)?;
                if !f.logical_state()?.equal_up_to_global_phase(&direct, 1e-10)? {
                    return Ok(Some(format!("branch {:02b} differs (state seed {state_seed})", branch)));
                }
            }
        }
        Ok(None)
    })();
    check("telegate_branches", outcome, "4 branches x 4 states".into())
}

/// Sweep points of the equivalence check.
pub fn equivalence_points(max_n: usize) -> Vec<(usize, usize)> {
    let mut pts = Vec::new();
    for n in (4..=max_n).step_by(2) {
        for k in [1, 2, 4, 8] {
            if k <= n {
                pts.push((n, k));
            }
        }
    }
    pts
}

pub const EQUIVALENCE_THETAS: [f64; 3] = [0.0, 1.0 / 3.0, 2.0 / 3.0];
pub const EQUIVALENCE_SEEDS: [u64; 3] = [0, 1, 2];

/// One equivalence point. Returns a reason on mismatch.
///
/// Telegate runs compare the logical pre-measurement state with the
/// monolithic one up to global phase (1e-8) and both modes require the exact
/// distribution's classical fidelity to be 1 within 1e-10. Resource counters
/// are checked against the formulas on the way.
pub fn equivalence_point(
    n: usize,
    k: usize,
    theta: f64,
    mode: Mode,
    seed: u64,
    faults: FaultInjection,
) -> Result<Option<String>> {
    let plan = PartitionPlan::new(n, k)?;
    let phase = PhaseAngle::new(theta)?;
    let mut opts = RunOptions::new(16, seed);
    opts.faults = faults;
    let out = run_distributed(&plan, phase, mode, &opts)?;
    let label = format!("n={n} k={k} theta={theta:.6} {mode} seed={seed}");
    if let Some(state) = &out.logical_state {
        if !state.equal_up_to_global_phase(&reference_state(n, phase)?, 1e-8)? {
            return Ok(Some(format!("{label}: logical state differs")));
        }
    }
    let fid = classical_fidelity(&out.exact, &out.reference);
    if (fid - 1.0).abs() > 1e-10 {
        return Ok(Some(format!("{label}: exact fidelity {fid}")));
    }
    let budget = epr_budget(&plan);
    let sessions = build_schedule(&plan).cat_sessions() as u64;
    let (want_epr, want_msgs) = match mode {
        Mode::Telegate => (budget, 2 * budget),
        Mode::Semiclassical => (0, feed_forward_messages(&plan)),
    };
    if out.metrics.epr_count != want_epr || sessions != budget {
        return Ok(Some(format!(
            "{label}: epr {} (formula {budget}, sessions {sessions})",
            out.metrics.epr_count
        )));
    }
    if out.metrics.classical_msg_count != want_msgs {
        return Ok(Some(format!(
            "{label}: {} messages, expected {want_msgs}",
            out.metrics.classical_msg_count
        )));
    }
    if out.metrics.block_slots != 2 * k - 1 {
        return Ok(Some(format!("{label}: {} slots", out.metrics.block_slots)));
    }
    Ok(None)
}

/// Semiclassical message count: every qubit of node `a` is forwarded to each
/// later node once.
pub fn feed_forward_messages(plan: &PartitionPlan) -> u64 {
    let k = plan.k();
    plan.sizes()
        .iter()
        .enumerate()
        .map(|(a, &m)| (m * (k - 1 - a)) as u64)
        .sum()
}

/// Distributed against monolithic for `n <= max_n`, all modes, thetas and
/// seeds of the acceptance grid.
pub fn check_equivalence(max_n: usize, faults: FaultInjection) -> CheckResult {
    let mut runs = 0;
    let outcome = (|| {
        for (n, k) in equivalence_points(max_n) {
            for theta in EQUIVALENCE_THETAS {
                for mode in [Mode::Telegate, Mode::Semiclassical] {
                    for seed in EQUIVALENCE_SEEDS {
                        runs += 1;
                        if let Some(why) = equivalence_point(n, k, theta, mode, seed, faults)? {
                            return Ok(Some(why));
                        }
                    }
                }
            }
        }
        Ok(None)
    })();
    check("distributed_equivalence", outcome, format!("{runs} runs, n <= {max_n}"))
}

/// Formula values: grouped budget against the counter and the naive bound.
pub fn check_epr_formula() -> CheckResult {
    let outcome = (|| {
        let plan = PartitionPlan::new(8, 4)?;
        if epr_budget(&plan) != 12 || naive_epr_budget(8) != 28 {
            return Ok(Some(format!(
                "n=8 k=4: grouped {} naive {}",
                epr_budget(&plan),
                naive_epr_budget(8)
            )));
        }
        let plan = PartitionPlan::new(10, 4)?;
        if epr_budget(&plan) != 12 {
            return Ok(Some(format!("n=10 k=4: grouped {}", epr_budget(&plan))));
        }
        for n in 1..=12 {
            for k in 1..=n {
                let plan = PartitionPlan::new(n, k)?;
                let formula: usize = plan.sizes().iter().enumerate().map(|(i, m)| m * (k - 1 - i)).sum();
                if epr_budget(&plan) != formula as u64 || build_schedule(&plan).cat_sessions() != formula {
                    return Ok(Some(format!("n={n} k={k}: budget mismatch")));
                }
            }
        }
        Ok(None)
    })();
    check("epr_formula", outcome, "n=8 k=4: 12 grouped, 28 naive".into())
}

pub fn check_block_slots() -> CheckResult {
    let outcome = (|| {
        for k in [1, 2, 4, 8] {
            let slots = build_schedule(&PartitionPlan::new(8, k)?).slot_count();
            if slots != 2 * k - 1 {
                return Ok(Some(format!("k={k}: {slots} slots")));
            }
        }
        Ok(None)
    })();
    check("block_slots", outcome, "2k - 1 for k in {1, 2, 4, 8}".into())
}

/// Dyadic phases `j / 2^n` must come out as `j` with probability 1:
/// exhaustive at n = 4, every 7th `j` at n = 6 and 8.
pub fn check_phase_recovery() -> CheckResult {
    let outcome = (|| {
        for (n, step) in [(4usize, 1u64), (6, 7), (8, 7)] {
            let plan = PartitionPlan::new(n, 2)?;
            for j in (0..1u64 << n).step_by(step as usize) {
                let phase = PhaseAngle::dyadic(j, n)?;
                let semi = semiclassical_exact_distribution(&plan, phase)?;
                let mono = output_distribution(&reference_state(n, phase)?)?;
                if (semi.get(j) - 1.0).abs() > 1e-10 || (mono.get(j) - 1.0).abs() > 1e-10 {
                    return Ok(Some(format!("n={n} j={j}")));
                }
            }
        }
        Ok(None)
    })();
    check("phase_recovery", outcome, "n in {4, 6, 8}".into())
}

/// Runs every check in order.
pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckResult> {
    vec![
        check_gate_multiset(opts.schedule_mutation),
        check_telegate_branches(opts.faults),
        check_equivalence(opts.max_n(), opts.faults),
        check_epr_formula(),
        check_block_slots(),
        check_phase_recovery(),
    ]
}

/// Mutation used in tests: gradient gates paired as if the control order
/// were not reversed.
#[doc(hidden)]
pub fn unreversed_controls(schedule: &mut DistributedSchedule) {
    let plan = schedule.plan().clone();
    for sb in schedule.blocks_mut() {
        if let crate::qft::Block::Gradient(g) = &mut sb.block {
            let (off_a, off_b) = (plan.offset(g.control_node), plan.offset(g.target_node));
            let m_a = plan.sizes()[g.control_node];
            for gg in &mut g.gates {
                let c = m_a - 1 - gg.control;
                gg.order = ((off_b + gg.target) - (off_a + c) + 1) as u32;
            }
        }
    }
}
