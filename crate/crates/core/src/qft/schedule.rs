//! Block schedule of the distributed inverse QFT.
//!
//! Node `b` runs its local inverse QFT in slot `2b`. The phase gradient from
//! an earlier node `a` onto node `b` runs in slot `a + b`, which lies after
//! node `a` has finished and before node `b` starts. Blocks sharing a slot
//! touch disjoint nodes, so `k` nodes need `2k - 1` slots.
//!
//! Inside a gradient block the gate between control `c` of node `a` and
//! target `t` of node `b` has angle `-2π / 2^d` with
//! `d = (off_b + t) - (off_a + c) + 1`. Because the output reversal is done
//! classically, the control with the highest local index pairs with the
//! smallest `d`.

use std::collections::BTreeMap;

use super::{gradient_angle, inverse_qft_gates};
use crate::fabric::PartitionPlan;
use crate::statevector::Gate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientGate {
    /// Local index on the control node.
    pub control: usize,
    /// Local index on the target node.
    pub target: usize,
    /// Gradient order; the gate angle is `-2π / 2^order`.
    pub order: u32,
}

impl GradientGate {
    pub fn angle(&self) -> f64 {
        gradient_angle(self.order)
    }
}

/// Controlled phases from one node's qubits onto a later node's qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBlock {
    pub control_node: usize,
    pub target_node: usize,
    /// Grouped by control, targets ascending within each control.
    pub gates: Vec<GradientGate>,
}

impl GradientBlock {
    /// Local control indices in the order their cat sessions open.
    pub fn controls(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for g in &self.gates {
            if out.last() != Some(&g.control) {
                out.push(g.control);
            }
        }
        out
    }

    /// Gates sharing control `control`.
    pub fn gates_for(&self, control: usize) -> impl Iterator<Item = &GradientGate> {
        self.gates.iter().filter(move |g| g.control == control)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    LocalInverseQft { node: usize },
    Gradient(GradientBlock),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledBlock {
    pub slot: usize,
    pub block: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedSchedule {
    plan: PartitionPlan,
    blocks: Vec<ScheduledBlock>,
}

/// Builds the recursive `k`-node schedule for `plan`.
pub fn build_schedule(plan: &PartitionPlan) -> DistributedSchedule {
    let k = plan.k();
    let mut by_slot: BTreeMap<usize, Vec<Block>> = BTreeMap::new();
    for b in 0..k {
        by_slot
            .entry(2 * b)
            .or_default()
            .push(Block::LocalInverseQft { node: b });
        for a in 0..b {
            by_slot
                .entry(a + b)
                .or_default()
                .push(Block::Gradient(gradient_block(plan, a, b)));
        }
    }
    let blocks = by_slot
        .into_iter()
        .flat_map(|(slot, blocks)| blocks.into_iter().map(move |block| ScheduledBlock { slot, block }))
        .collect();
    DistributedSchedule {
        plan: plan.clone(),
        blocks,
    }
}

fn gradient_block(plan: &PartitionPlan, a: usize, b: usize) -> GradientBlock {
    let (off_a, off_b) = (plan.offset(a), plan.offset(b));
    let mut gates = Vec::with_capacity(plan.sizes()[a] * plan.sizes()[b]);
    for control in 0..plan.sizes()[a] {
        for target in 0..plan.sizes()[b] {
            let order = (off_b + target) - (off_a + control) + 1;
            gates.push(GradientGate {
                control,
                target,
                order: order as u32,
            });
        }
    }
    GradientBlock {
        control_node: a,
        target_node: b,
        gates,
    }
}

impl DistributedSchedule {
    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    /// Blocks in execution order (slot ascending).
    pub fn blocks(&self) -> &[ScheduledBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut Vec<ScheduledBlock> {
        &mut self.blocks
    }

    /// Distinct time slots, `2k - 1` for `k` nodes.
    pub fn slot_count(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.slot + 1)
    }

    /// Total blocks, local and gradient: `k + k(k-1)/2`.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// One cat session per (control qubit, target node): the EPR demand.
    pub fn cat_sessions(&self) -> usize {
        self.gradient_blocks().map(|g| g.controls().len()).sum()
    }

    pub fn gradient_blocks(&self) -> impl Iterator<Item = &GradientBlock> {
        self.blocks.iter().filter_map(|b| match &b.block {
            Block::Gradient(g) => Some(g),
            Block::LocalInverseQft { .. } => None,
        })
    }

    /// Global logical indices of `node`'s qubits.
    pub fn node_qubits(&self, node: usize) -> Vec<usize> {
        self.plan.logical_range(node).collect()
    }

    /// The schedule as one monolithic gate list over global logical
    /// indices, with every teleported gate replaced by a direct `CP`.
    pub fn flatten(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for sb in &self.blocks {
            match &sb.block {
                Block::LocalInverseQft { node } => {
                    gates.extend(inverse_qft_gates(&self.node_qubits(*node)));
                }
                Block::Gradient(g) => {
                    let (off_a, off_b) = (self.plan.offset(g.control_node), self.plan.offset(g.target_node));
                    gates.extend(
                        g.gates
                            .iter()
                            .map(|gg| Gate::CP(off_a + gg.control, off_b + gg.target, gg.angle())),
                    );
                }
            }
        }
        gates
    }
}

/// Canonical multiset key of a gate: kind, operands and angle rounded to
/// 1e-12 rad.
pub(crate) fn gate_key(g: &Gate) -> (u8, usize, usize, i64) {
    let round = |phi: f64| (phi * 1e12).round() as i64;
    match *g {
        Gate::H(q) => (0, q, usize::MAX, 0),
        Gate::X(q) => (1, q, usize::MAX, 0),
        Gate::Z(q) => (2, q, usize::MAX, 0),
        Gate::P(q, phi) => (3, q, usize::MAX, round(phi)),
        Gate::CP(a, b, phi) => (4, a, b, round(phi)),
        Gate::CNOT(a, b) => (5, a, b, 0),
    }
}

/// Multiset of gates keyed by [`gate_key`].
pub fn gate_multiset(gates: &[Gate]) -> BTreeMap<(u8, usize, usize, i64), usize> {
    let mut m = BTreeMap::new();
    for g in gates {
        *m.entry(gate_key(g)).or_insert(0) += 1;
    }
    m
}
