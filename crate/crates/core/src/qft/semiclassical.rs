//! Exact output distribution of the semiclassical mode by enumerating every
//! measurement branch.
//!
//! Qubits are measured in order `0..n`. Before qubit `j` is rotated and
//! measured it picks up the phases conditioned on the bits already measured:
//! the local inverse-QFT phases of its own node and the forwarded gradient
//! phases of earlier nodes. Measured qubits are dropped from the register, so
//! a branch at depth `j` carries `2^(n-j)` amplitudes.

use std::collections::BTreeMap;

use super::schedule::{build_schedule, Block};
use super::{fourier_prep_gates, inverse_qft_gates, rev_postprocess, PhaseAngle};
use crate::error::Result;
use crate::fabric::PartitionPlan;
use crate::metrics::Distribution;
use crate::statevector::{Gate, StateVector};

/// Branches lighter than this are dropped.
const PRUNE: f64 = 1e-18;

/// For each qubit, the `(earlier qubit, angle)` pairs whose measured bit
/// conditions its phase, taken from the schedule.
fn conditioned_phases(plan: &PartitionPlan) -> Vec<Vec<(usize, f64)>> {
    let mut cond = vec![Vec::new(); plan.n()];
    for sb in build_schedule(plan).blocks() {
        match &sb.block {
            Block::LocalInverseQft { node } => {
                let qubits: Vec<usize> = plan.logical_range(*node).collect();
                for g in inverse_qft_gates(&qubits) {
                    if let Gate::CP(c, t, phi) = g {
                        cond[t].push((c, phi));
                    }
                }
            }
            Block::Gradient(g) => {
                let (off_a, off_b) = (plan.offset(g.control_node), plan.offset(g.target_node));
                for gg in &g.gates {
                    cond[off_b + gg.target].push((off_a + gg.control, gg.angle()));
                }
            }
        }
    }
    cond
}

/// Exact distribution over REV-postprocessed output values.
pub fn semiclassical_exact_distribution(plan: &PartitionPlan, theta: PhaseAngle) -> Result<Distribution> {
    let n = plan.n();
    let qubits: Vec<usize> = (0..n).collect();
    let mut state = StateVector::new(n)?;
    state.apply_all(&fourier_prep_gates(&qubits, 0, n, theta))?;
    let cond = conditioned_phases(plan);
    let mut probs = BTreeMap::new();
    let mut bits = Vec::with_capacity(n);
    descend(state, 1.0, &cond, &mut bits, &mut probs)?;
    // Renormalize away the pruned mass.
    let total: f64 = probs.values().sum();
    for p in probs.values_mut() {
        *p /= total;
    }
    Distribution::new(probs)
}

fn descend(
    mut state: StateVector,
    weight: f64,
    cond: &[Vec<(usize, f64)>],
    bits: &mut Vec<u8>,
    out: &mut BTreeMap<u64, f64>,
) -> Result<()> {
    let j = bits.len();
    let phase: f64 = cond[j]
        .iter()
        .filter(|(c, _)| bits[*c] == 1)
        .map(|(_, phi)| phi)
        .sum();
    if phase != 0.0 {
        state.apply(&Gate::P(0, phase))?;
    }
    state.apply(&Gate::H(0))?;
    let last = j + 1 == cond.len();
    for bit in 0..2u8 {
        let (p, rest) = state.split_off(0, bit)?;
        let w = weight * p;
        if w < PRUNE {
            continue;
        }
        bits.push(bit);
        if last {
            *out.entry(rev_postprocess(bits)).or_insert(0.0) += w;
        } else if let Some(rest) = rest {
            descend(rest, w, cond, bits, out)?;
        }
        bits.pop();
    }
    Ok(())
}
