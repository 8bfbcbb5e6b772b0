use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schedule::{build_schedule, Block, DistributedSchedule, GradientBlock};
use super::{fourier_prep, fourier_prep_gates, inverse_qft_gates, inverse_qft_local, value_of_index, MeasuredOutcome, PhaseAngle};
use crate::error::{Error, Result};
use crate::fabric::{Fabric, FabricConfig, FaultInjection, PartitionPlan};
use crate::metrics::{classical_fidelity, measure_run, Distribution, RunMetrics};
use crate::statevector::{Gate, StateVector};
use crate::telegate::CatHandle;

/// How cross-node phase gradients are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Cat-entangler/disentangler gate teleportation.
    Telegate,
    /// Early measurement with classically controlled phases, no EPR pairs.
    Semiclassical,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Telegate => "telegate",
            Mode::Semiclassical => "semiclassical",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "telegate" => Ok(Mode::Telegate),
            "semiclassical" => Ok(Mode::Semiclassical),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub shots: usize,
    pub seed: u64,
    /// Classical latency in ticks.
    pub latency: u64,
    /// Abort with [`Error::Timeout`] once this instant has passed.
    pub deadline: Option<Instant>,
    #[doc(hidden)]
    pub faults: FaultInjection,
}

impl RunOptions {
    pub fn new(shots: usize, seed: u64) -> Self {
        Self {
            shots,
            seed,
            latency: 1,
            deadline: None,
            faults: FaultInjection::default(),
        }
    }

    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    fn fabric_config(&self, comm_qubits: bool) -> FabricConfig {
        FabricConfig {
            latency: self.latency,
            comm_qubits,
            faults: self.faults,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Histogram of REV-postprocessed output values.
    pub counts: BTreeMap<u64, usize>,
    pub metrics: RunMetrics,
    /// Exact output distribution of this execution mode.
    pub exact: Distribution,
    /// Exact output distribution of the monolithic reference.
    pub reference: Distribution,
    /// Pre-measurement state of the logical qubits, when the mode has one.
    pub logical_state: Option<StateVector>,
}

impl RunOutput {
    /// Classical fidelity of the sampled histogram against the reference.
    pub fn sampled_fidelity(&self) -> Result<f64> {
        Ok(classical_fidelity(&Distribution::from_counts(&self.counts)?, &self.reference))
    }

    /// Most frequent sampled value; ties go to the smaller value.
    pub fn modal_outcome(&self) -> Option<u64> {
        self.counts
            .iter()
            .fold(None, |best: Option<(u64, usize)>, (&v, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((v, c)),
            })
            .map(|(v, _)| v)
    }
}

/// Exact output distribution of a pre-measurement register state.
pub(crate) fn output_distribution(state: &StateVector) -> Result<Distribution> {
    let n = state.num_qubits();
    let mut dense = vec![0.0; state.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        dense[value_of_index(i, n) as usize] = a.norm_sqr();
    }
    Distribution::from_dense(&dense)
}

/// Pre-measurement state of the monolithic circuit.
pub(crate) fn reference_state(n: usize, theta: PhaseAngle) -> Result<StateVector> {
    let qubits: Vec<usize> = (0..n).collect();
    let mut state = StateVector::new(n)?;
    fourier_prep(&mut state, &qubits, theta)?;
    inverse_qft_local(&mut state, &qubits)?;
    Ok(state)
}

fn values_from_bitstrings(raw: BTreeMap<String, usize>) -> Result<BTreeMap<u64, usize>> {
    let mut counts = BTreeMap::new();
    for (bits, c) in raw {
        *counts.entry(MeasuredOutcome::parse(&bits)?.value).or_insert(0) += c;
    }
    Ok(counts)
}

/// Non-distributed reference: prepare, inverse QFT, sample.
pub fn run_monolithic_reference(n: usize, theta: PhaseAngle, opts: &RunOptions) -> Result<RunOutput> {
    if n == 0 {
        return Err(Error::InvalidQubitCount { got: 0, max: 0 });
    }
    let (state, wall) = measure_run(|| reference_state(n, theta));
    let state = state?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let qubits: Vec<usize> = (0..n).collect();
    let counts = values_from_bitstrings(state.sample_counts(&qubits, opts.shots, &mut rng)?)?;
    let exact = output_distribution(&state)?;
    Ok(RunOutput {
        counts,
        metrics: RunMetrics {
            wall_time_seconds: wall,
            peak_state_bytes: state.allocated_bytes(),
            epr_count: 0,
            classical_msg_count: 0,
            midcircuit_measurements: 0,
            block_slots: 1,
            shots: opts.shots,
            fidelity_vs_reference: 1.0,
        },
        reference: exact.clone(),
        exact,
        logical_state: Some(state),
    })
}

/// Runs the distributed inverse QFT on `plan` in the given mode.
pub fn run_distributed(plan: &PartitionPlan, theta: PhaseAngle, mode: Mode, opts: &RunOptions) -> Result<RunOutput> {
    match mode {
        Mode::Telegate => run_telegate(plan, theta, opts),
        Mode::Semiclassical => run_semiclassical(plan, theta, opts),
    }
}

/// Each node prepares its own slice of the Fourier state.
pub(crate) fn prepare_nodes<R: Rng>(fabric: &mut Fabric<R>, theta: PhaseAngle) -> Result<()> {
    let plan = fabric.plan().clone();
    for node in 0..plan.k() {
        let qubits: Vec<usize> = plan.logical_range(node).collect();
        for g in fourier_prep_gates(&qubits, plan.offset(node), plan.n(), theta) {
            fabric.apply(&g.map_qubits(|q| plan.addr_of(q))?)?;
        }
    }
    Ok(())
}

fn run_gradient_block<R: Rng>(fabric: &mut Fabric<R>, block: &GradientBlock) -> Result<()> {
    let plan = fabric.plan().clone();
    for control in block.controls() {
        let addr = plan.logical(block.control_node, control)?;
        let mut cat = CatHandle::entangle(fabric, addr, block.target_node)?;
        for g in block.gates_for(control) {
            cat.controlled_phase(fabric, plan.logical(block.target_node, g.target)?, g.angle())?;
        }
        cat.disentangle(fabric)?;
    }
    Ok(())
}

/// Runs a schedule on a fabric holding a prepared Fourier state.
pub(crate) fn execute_telegate_schedule<R: Rng>(
    fabric: &mut Fabric<R>,
    schedule: &DistributedSchedule,
    opts: &RunOptions,
) -> Result<()> {
    let plan = fabric.plan().clone();
    for sb in schedule.blocks() {
        opts.check_deadline()?;
        match &sb.block {
            Block::LocalInverseQft { node } => {
                let qubits: Vec<usize> = plan.logical_range(*node).collect();
                for g in inverse_qft_gates(&qubits) {
                    fabric.apply(&g.map_qubits(|q| plan.addr_of(q))?)?;
                }
            }
            Block::Gradient(block) => run_gradient_block(fabric, block)?,
        }
    }
    Ok(())
}

fn run_telegate(plan: &PartitionPlan, theta: PhaseAngle, opts: &RunOptions) -> Result<RunOutput> {
    let schedule = build_schedule(plan);
    let n = plan.n();
    let (result, wall) = measure_run(|| -> Result<_> {
        let mut fabric = Fabric::new(
            plan.clone(),
            opts.fabric_config(true),
            ChaCha8Rng::seed_from_u64(opts.seed),
        )?;
        prepare_nodes(&mut fabric, theta)?;
        execute_telegate_schedule(&mut fabric, &schedule, opts)?;
        let logical = fabric.logical_state()?;
        let qubits: Vec<usize> = (0..n).collect();
        let raw = fabric.sample_counts(&qubits, opts.shots)?;
        Ok((logical, raw, fabric.counters(), fabric.peak_state_bytes()))
    });
    let (logical, raw, counters, peak) = result?;
    let exact = output_distribution(&logical)?;
    let reference = output_distribution(&reference_state(n, theta)?)?;
    Ok(RunOutput {
        counts: values_from_bitstrings(raw)?,
        metrics: RunMetrics {
            wall_time_seconds: wall,
            peak_state_bytes: peak,
            epr_count: counters.epr_created,
            classical_msg_count: counters.classical_messages,
            midcircuit_measurements: counters.midcircuit_measurements,
            block_slots: schedule.slot_count(),
            shots: opts.shots,
            fidelity_vs_reference: classical_fidelity(&exact, &reference),
        },
        exact,
        reference,
        logical_state: Some(logical),
    })
}

/// Teleportation-free execution: every output qubit is measured as soon as
/// its gates are done, and measured bits travel to later nodes as classical
/// messages that condition their phase rotations.
///
/// Each shot replays the circuit. Resource counters in the returned metrics
/// are those of a single execution.
pub fn run_semiclassical(plan: &PartitionPlan, theta: PhaseAngle, opts: &RunOptions) -> Result<RunOutput> {
    if opts.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let schedule = build_schedule(plan);
    let n = plan.n();
    let (result, wall) = measure_run(|| -> Result<_> {
        let mut fabric = Fabric::new(
            plan.clone(),
            opts.fabric_config(false),
            ChaCha8Rng::seed_from_u64(opts.seed),
        )?;
        prepare_nodes(&mut fabric, theta)?;
        let prepared = fabric.state().clone();
        let mut counts = BTreeMap::new();
        let mut per_shot = None;
        for _ in 0..opts.shots {
            opts.check_deadline()?;
            fabric.load_logical_state(&prepared)?;
            let bits = execute_semiclassical_schedule(&mut fabric, &schedule, opts)?;
            *counts.entry(MeasuredOutcome::from_raw(bits).value).or_insert(0) += 1;
            per_shot.get_or_insert(fabric.counters());
        }
        Ok((counts, per_shot.expect("at least one shot"), fabric.peak_state_bytes()))
    });
    let (counts, counters, peak) = result?;
    let exact = super::semiclassical_exact_distribution(plan, theta)?;
    let reference = output_distribution(&reference_state(n, theta)?)?;
    Ok(RunOutput {
        counts,
        metrics: RunMetrics {
            wall_time_seconds: wall,
            peak_state_bytes: peak,
            epr_count: counters.epr_created,
            classical_msg_count: counters.classical_messages,
            midcircuit_measurements: counters.midcircuit_measurements,
            block_slots: schedule.slot_count(),
            shots: opts.shots,
            fidelity_vs_reference: classical_fidelity(&exact, &reference),
        },
        exact,
        reference,
        logical_state: None,
    })
}

/// One semiclassical pass over the schedule. Returns the raw output bits.
pub(crate) fn execute_semiclassical_schedule<R: Rng>(
    fabric: &mut Fabric<R>,
    schedule: &DistributedSchedule,
    opts: &RunOptions,
) -> Result<Vec<u8>> {
    let plan = fabric.plan().clone();
    let n = plan.n();
    let mut pending_phase = vec![0.0f64; n];
    let mut bits: Vec<Option<u8>> = vec![None; n];
    for sb in schedule.blocks() {
        opts.check_deadline()?;
        match &sb.block {
            Block::LocalInverseQft { node } => {
                let qubits: Vec<usize> = plan.logical_range(*node).collect();
                for g in inverse_qft_gates(&qubits) {
                    match g {
                        Gate::CP(control, target, phi) => {
                            let bit = bits[control].ok_or_else(|| {
                                Error::Protocol(format!("qubit {control} used before measurement"))
                            })?;
                            if bit == 1 {
                                pending_phase[target] += phi;
                            }
                        }
                        Gate::H(q) => {
                            let addr = plan.addr_of(q)?;
                            if pending_phase[q] != 0.0 {
                                fabric.apply(&Gate::P(addr, pending_phase[q]))?;
                            }
                            fabric.apply(&Gate::H(addr))?;
                            bits[q] = Some(fabric.measure(addr)?);
                        }
                        other => {
                            return Err(Error::Protocol(format!("unexpected gate {other:?}")));
                        }
                    }
                }
            }
            Block::Gradient(block) => {
                let (src, dst) = (block.control_node, block.target_node);
                for control in block.controls() {
                    let global = plan.offset(src) + control;
                    let bit = bits[global]
                        .ok_or_else(|| Error::Protocol(format!("qubit {global} forwarded before measurement")))?;
                    fabric.send_classical(src, dst, crate::fabric::MessageTag::FeedForward, bit)?;
                    let msg = fabric.await_message(src, dst)?;
                    if msg.payload == 1 {
                        for g in block.gates_for(control) {
                            pending_phase[plan.offset(dst) + g.target] += g.angle();
                        }
                    }
                }
            }
        }
    }
    bits.into_iter()
        .enumerate()
        .map(|(q, b)| b.ok_or_else(|| Error::Protocol(format!("qubit {q} never measured"))))
        .collect()
}
