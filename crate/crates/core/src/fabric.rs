//! Simulated quantum nodes sharing one global statevector.
//!
//! Global layout: the `n` logical qubits come first, contiguous per node in
//! node order, followed by one communication qubit per node. Every gate goes
//! through [`Fabric::apply`], which rejects operands that sit on different
//! nodes. Cross-node interaction happens only through EPR pairs and
//! classical messages, and the fabric counts both.

use std::collections::{BTreeMap, VecDeque};
use std::ops::Range;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

/// Assignment of `n` logical qubits to `k` nodes.
///
/// Nodes `0..k-1` get `n / k` qubits each and the last node also takes the
/// remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    n: usize,
    k: usize,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    comm_slots: Vec<usize>,
}

impl PartitionPlan {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("n must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidPartition("k must be at least 1".into()));
        }
        if k > n {
            return Err(Error::KExceedsN { n, k });
        }
        let base = n / k;
        let mut sizes = vec![base; k];
        sizes[k - 1] += n % k;
        let offsets = sizes
            .iter()
            .scan(0, |acc, &m| {
                let start = *acc;
                *acc += m;
                Some(start)
            })
            .collect();
        let comm_slots = (0..k).map(|node| n + node).collect();
        Ok(Self {
            n,
            k,
            sizes,
            offsets,
            comm_slots,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Global indices of the communication qubits, one per node.
    pub fn comm_slots(&self) -> &[usize] {
        &self.comm_slots
    }

    /// Logical plus communication qubits.
    pub fn total_qubits(&self) -> usize {
        self.n + self.k
    }

    /// Global indices of the logical qubits held by `node`.
    pub fn logical_range(&self, node: usize) -> Range<usize> {
        self.offsets[node]..self.offsets[node] + self.sizes[node]
    }

    pub fn offset(&self, node: usize) -> usize {
        self.offsets[node]
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.k {
            return Err(Error::NodeOutOfRange { node, k: self.k });
        }
        Ok(())
    }

    pub fn logical(&self, node: usize, local: usize) -> Result<QubitAddr> {
        let addr = QubitAddr {
            node,
            slot: Slot::Logical(local),
        };
        self.global_index(addr)?;
        Ok(addr)
    }

    pub fn comm(&self, node: usize) -> Result<QubitAddr> {
        self.check_node(node)?;
        Ok(QubitAddr {
            node,
            slot: Slot::Comm,
        })
    }

    /// Address of a global logical index.
    pub fn addr_of(&self, global: usize) -> Result<QubitAddr> {
        if global < self.n {
            let node = self.offsets.partition_point(|&o| o <= global) - 1;
            Ok(QubitAddr {
                node,
                slot: Slot::Logical(global - self.offsets[node]),
            })
        } else if global < self.n + self.k {
            Ok(QubitAddr {
                node: global - self.n,
                slot: Slot::Comm,
            })
        } else {
            Err(Error::QubitOutOfRange {
                index: global,
                num_qubits: self.total_qubits(),
            })
        }
    }

    pub fn global_index(&self, addr: QubitAddr) -> Result<usize> {
        self.check_node(addr.node)?;
        match addr.slot {
            Slot::Logical(local) if local < self.sizes[addr.node] => {
                Ok(self.offsets[addr.node] + local)
            }
            Slot::Logical(_) => Err(Error::InvalidAddress(addr)),
            Slot::Comm => Ok(self.comm_slots[addr.node]),
        }
    }

    /// Passes iff every operand of `gate` lives on a single node.
    pub fn check_locality(&self, gate: &Gate<QubitAddr>) -> Result<()> {
        let ops = gate.operands();
        for &op in &ops {
            self.global_index(op)?;
        }
        if let [a, b] = ops[..] {
            if a.node != b.node {
                return Err(Error::CrossNodeGate { a, b });
            }
        }
        Ok(())
    }
}

/// Which qubit of a node an address designates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Logical(usize),
    Comm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitAddr {
    pub node: usize,
    pub slot: Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageTag {
    /// Cat-entangler measurement, drives the X correction on the cat qubit.
    CatEntangle,
    /// Cat-disentangler measurement, drives the Z correction on the control.
    CatDisentangle,
    /// A measured output bit forwarded for classically controlled phases.
    FeedForward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalMessage {
    pub src: usize,
    pub dst: usize,
    pub tag: MessageTag,
    pub payload: u8,
    /// Tick at which the message becomes deliverable.
    pub tick: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FabricCounters {
    pub epr_created: u64,
    pub classical_messages: u64,
    pub midcircuit_measurements: u64,
    pub current_tick: u64,
}

/// Deliberate protocol faults, used to check that verification catches them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    pub skip_entangle_x: bool,
    pub skip_disentangle_z: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FabricConfig {
    /// Classical latency in ticks.
    pub latency: u64,
    /// Allocate one communication qubit per node. Without them the state
    /// holds only the logical qubits and EPR allocation fails.
    pub comm_qubits: bool,
    #[doc(hidden)]
    pub faults: FaultInjection,
}

impl Default for FabricConfig {
    fn default() -> Self {
        Self {
            latency: 1,
            comm_qubits: true,
            faults: FaultInjection::default(),
        }
    }
}

/// `k` nodes over one shared statevector.
pub struct Fabric<R: Rng = ChaCha8Rng> {
    plan: PartitionPlan,
    config: FabricConfig,
    state: StateVector,
    rng: R,
    counters: FabricCounters,
    in_flight: VecDeque<ClassicalMessage>,
    comm_busy: Vec<bool>,
    forced: VecDeque<u8>,
    peak_state_bytes: u64,
}

impl<R: Rng> Fabric<R> {
    pub fn new(plan: PartitionPlan, config: FabricConfig, rng: R) -> Result<Self> {
        let qubits = if config.comm_qubits {
            plan.total_qubits()
        } else {
            plan.n()
        };
        let state = StateVector::new(qubits)?;
        let peak_state_bytes = state.allocated_bytes();
        let k = plan.k();
        Ok(Self {
            plan,
            config,
            state,
            rng,
            counters: FabricCounters::default(),
            in_flight: VecDeque::new(),
            comm_busy: vec![false; k],
            forced: VecDeque::new(),
            peak_state_bytes,
        })
    }

    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    pub fn config(&self) -> &FabricConfig {
        &self.config
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn counters(&self) -> FabricCounters {
        self.counters
    }

    pub fn peak_state_bytes(&self) -> u64 {
        self.peak_state_bytes
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Replaces the logical part of the state, keeping counters.
    ///
    /// `logical` must have `n` qubits; communication qubits start in `|0⟩`.
    pub fn load_logical_state(&mut self, logical: &StateVector) -> Result<()> {
        if logical.num_qubits() != self.plan.n() {
            return Err(Error::DimensionMismatch {
                left: logical.num_qubits(),
                right: self.plan.n(),
            });
        }
        let shift = self.state.num_qubits() - self.plan.n();
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); self.state.len()];
        for (i, a) in logical.amplitudes().iter().enumerate() {
            amps[i << shift] = *a;
        }
        self.state = StateVector::from_amplitudes(amps)?;
        Ok(())
    }

    /// Queues outcomes that the next protocol measurements will take instead
    /// of sampling. Used to walk every measurement branch deterministically.
    pub fn force_outcomes(&mut self, outcomes: impl IntoIterator<Item = u8>) {
        self.forced.extend(outcomes);
    }

    pub fn comm_busy(&self, node: usize) -> bool {
        self.comm_busy[node]
    }

    fn index(&self, addr: QubitAddr) -> Result<usize> {
        if addr.slot == Slot::Comm && !self.config.comm_qubits {
            return Err(Error::NoCommQubits);
        }
        self.plan.global_index(addr)
    }

    /// Applies a node-local gate.
    pub fn apply(&mut self, gate: &Gate<QubitAddr>) -> Result<()> {
        self.plan.check_locality(gate)?;
        let global = gate.map_qubits(|a| self.index(a))?;
        self.state.apply(&global)
    }

    /// Mid-circuit measurement, counted.
    pub fn measure(&mut self, addr: QubitAddr) -> Result<u8> {
        let q = self.index(addr)?;
        self.counters.midcircuit_measurements += 1;
        match self.forced.pop_front() {
            Some(bit) => {
                self.state.project(q, bit)?;
                Ok(bit)
            }
            None => self.state.measure(q, &mut self.rng),
        }
    }

    /// Resets a qubit to `|0⟩`. Not counted as a protocol measurement.
    pub fn reset(&mut self, addr: QubitAddr) -> Result<()> {
        let q = self.index(addr)?;
        self.state.reset(q, &mut self.rng)?;
        Ok(())
    }

    /// Prepares `(|00⟩ + |11⟩)/√2` on the communication qubits of two nodes
    /// and reserves both slots.
    pub fn allocate_epr(&mut self, node_a: usize, node_b: usize) -> Result<(QubitAddr, QubitAddr)> {
        if !self.config.comm_qubits {
            return Err(Error::NoCommQubits);
        }
        if node_a == node_b {
            return Err(Error::Protocol(format!(
                "EPR pair requested within node {node_a}"
            )));
        }
        let a = self.plan.comm(node_a)?;
        let b = self.plan.comm(node_b)?;
        for node in [node_a, node_b] {
            if self.comm_busy[node] {
                return Err(Error::CommSlotBusy(node));
            }
        }
        self.reset(a)?;
        self.reset(b)?;
        // The source prepares the pair; both halves are on different nodes,
        // so the preparation bypasses the locality check.
        let (qa, qb) = (self.index(a)?, self.index(b)?);
        self.state.apply(&Gate::H(qa))?;
        self.state.apply(&Gate::CNOT(qa, qb))?;
        self.comm_busy[node_a] = true;
        self.comm_busy[node_b] = true;
        self.counters.epr_created += 1;
        Ok((a, b))
    }

    /// Marks a communication slot free. Fails if it was not reserved.
    pub fn release_comm(&mut self, node: usize) -> Result<()> {
        self.plan.check_node(node)?;
        if !self.comm_busy[node] {
            return Err(Error::Protocol(format!(
                "comm slot of node {node} released twice"
            )));
        }
        self.comm_busy[node] = false;
        Ok(())
    }

    /// Enqueues a message; it becomes deliverable after the configured latency.
    pub fn send_classical(&mut self, src: usize, dst: usize, tag: MessageTag, payload: u8) -> Result<()> {
        self.plan.check_node(src)?;
        self.plan.check_node(dst)?;
        if src == dst {
            return Err(Error::SelfMessage(src));
        }
        self.in_flight.push_back(ClassicalMessage {
            src,
            dst,
            tag,
            payload,
            tick: self.counters.current_tick + self.config.latency,
        });
        self.counters.classical_messages += 1;
        Ok(())
    }

    pub fn advance_clock(&mut self, ticks: u64) {
        self.counters.current_tick += ticks;
    }

    /// Oldest deliverable message from `src` to `dst`, if any.
    pub fn receive(&mut self, src: usize, dst: usize) -> Option<ClassicalMessage> {
        let now = self.counters.current_tick;
        let pos = self
            .in_flight
            .iter()
            .position(|m| m.src == src && m.dst == dst)?;
        if self.in_flight[pos].tick > now {
            return None;
        }
        self.in_flight.remove(pos)
    }

    /// Waits out the latency and takes the pending message `src -> dst`.
    pub fn await_message(&mut self, src: usize, dst: usize) -> Result<ClassicalMessage> {
        let latency = self.config.latency;
        self.advance_clock(latency);
        self.receive(src, dst)
            .ok_or(Error::MessageMissing { src, dst })
    }

    /// Samples the listed qubits without collapsing the state.
    pub fn sample_counts(&mut self, qubits: &[usize], shots: usize) -> Result<BTreeMap<String, usize>> {
        self.state.sample_counts(qubits, shots, &mut self.rng)
    }

    pub fn messages_in_flight(&self) -> usize {
        self.in_flight.len()
    }

    /// Logical-qubit state with the communication qubits traced out. They
    /// must all be in `|0⟩`.
    pub fn logical_state(&self) -> Result<StateVector> {
        if !self.config.comm_qubits {
            return Ok(self.state.clone());
        }
        let (logical, leaked) = self.state.truncate_trailing(self.plan.n())?;
        if leaked > 1e-12 {
            return Err(Error::Protocol(format!(
                "communication qubits hold {leaked:e} probability outside |0>"
            )));
        }
        Ok(logical)
    }
}
