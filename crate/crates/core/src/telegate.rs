//! Cat-entangler / cat-disentangler gate teleportation.
//!
//! A control qubit on node A is shared with node B through one EPR pair.
//! While the session is open, node B holds a "cat" copy of the control in
//! its communication qubit and can apply any number of controlled phases
//! locally. Closing the session removes the copy and returns the control to
//! the state it would have had if every gate had been applied directly.
//!
//! Each session costs one EPR pair, two classical messages and two
//! mid-circuit measurements no matter how many gates run under it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fabric::{Fabric, MessageTag, QubitAddr, Slot};
use crate::statevector::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatState {
    Entangled,
    Disentangled,
}

/// An open teleported-control session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatHandle {
    control: QubitAddr,
    remote_cat: QubitAddr,
    epr_id: u64,
    state: CatState,
}

impl CatHandle {
    /// Runs the cat-entangler: shares `control` with `target_node`.
    pub fn entangle<R: Rng>(fabric: &mut Fabric<R>, control: QubitAddr, target_node: usize) -> Result<Self> {
        let Slot::Logical(_) = control.slot else {
            return Err(Error::Protocol("cat control must be a logical qubit".into()));
        };
        fabric.plan().global_index(control)?;
        if control.node == target_node {
            return Err(Error::Protocol(format!(
                "control and target both on node {target_node}"
            )));
        }
        let src = control.node;
        let (epr_src, epr_dst) = fabric.allocate_epr(src, target_node)?;
        let epr_id = fabric.counters().epr_created;

        fabric.apply(&Gate::CNOT(control, epr_src))?;
        let bit = fabric.measure(epr_src)?;
        fabric.reset(epr_src)?;
        fabric.release_comm(src)?;
        fabric.send_classical(src, target_node, MessageTag::CatEntangle, bit)?;

        let msg = fabric.await_message(src, target_node)?;
        if msg.payload == 1 && !fabric.config().faults.skip_entangle_x {
            fabric.apply(&Gate::X(epr_dst))?;
        }
        Ok(Self {
            control,
            remote_cat: epr_dst,
            epr_id,
            state: CatState::Entangled,
        })
    }

    pub fn control(&self) -> QubitAddr {
        self.control
    }

    pub fn remote_cat(&self) -> QubitAddr {
        self.remote_cat
    }

    pub fn epr_id(&self) -> u64 {
        self.epr_id
    }

    pub fn state(&self) -> CatState {
        self.state
    }

    /// Applies `CP(phase)` from the cat qubit onto `target`, a logical qubit
    /// on the receiving node. The gate is local to that node.
    pub fn controlled_phase<R: Rng>(&self, fabric: &mut Fabric<R>, target: QubitAddr, phase: f64) -> Result<()> {
        if self.state != CatState::Entangled {
            return Err(Error::Protocol("cat session already closed".into()));
        }
        if target.node != self.remote_cat.node || !matches!(target.slot, Slot::Logical(_)) {
            return Err(Error::Protocol(format!(
                "target {target:?} is not a logical qubit of node {}",
                self.remote_cat.node
            )));
        }
        fabric.apply(&Gate::CP(self.remote_cat, target, phase))
    }

    /// Runs the cat-disentangler and frees the receiving node's slot.
    pub fn disentangle<R: Rng>(&mut self, fabric: &mut Fabric<R>) -> Result<()> {
        if self.state != CatState::Entangled {
            return Err(Error::Protocol("cat session already closed".into()));
        }
        let (src, dst) = (self.remote_cat.node, self.control.node);
        fabric.apply(&Gate::H(self.remote_cat))?;
        let bit = fabric.measure(self.remote_cat)?;
        fabric.reset(self.remote_cat)?;
        fabric.send_classical(src, dst, MessageTag::CatDisentangle, bit)?;

        let msg = fabric.await_message(src, dst)?;
        if msg.payload == 1 && !fabric.config().faults.skip_disentangle_z {
            fabric.apply(&Gate::Z(self.control))?;
        }
        fabric.release_comm(src)?;
        self.state = CatState::Disentangled;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fabric::{FabricConfig, PartitionPlan};
    use crate::statevector::{Amplitude, StateVector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    use rand::Rng;

    fn fabric(n: usize, k: usize, seed: u64) -> Fabric {
        Fabric::new(
            PartitionPlan::new(n, k).unwrap(),
            FabricConfig::default(),
            ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    fn random_logical(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| Amplitude::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn classical_control_copies_into_cat() {
        for bit in 0..2u8 {
            let mut f = fabric(2, 2, 1);
            let control = f.plan().logical(0, 0).unwrap();
            if bit == 1 {
                f.apply(&Gate::X(control)).unwrap();
            }
            let h = CatHandle::entangle(&mut f, control, 1).unwrap();
            let cq = f.plan().global_index(control).unwrap();
            let cat = f.plan().global_index(h.remote_cat()).unwrap();
            let probs = f.state().marginal_probabilities(&[cq, cat]).unwrap();
            let expected = if bit == 0 { 0 } else { 3 };
            assert!((probs[expected] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn superposed_control_forms_cat_in_both_branches() {
        for outcome in 0..2u8 {
            let mut f = fabric(2, 2, 0);
            let control = f.plan().logical(0, 0).unwrap();
            f.apply(&Gate::H(control)).unwrap();
            f.force_outcomes([outcome]);
            let h = CatHandle::entangle(&mut f, control, 1).unwrap();
            let cq = f.plan().global_index(control).unwrap();
            let cat = f.plan().global_index(h.remote_cat()).unwrap();
            let amps = f.state().amplitudes();
            let n = f.state().num_qubits();
            let idx = |c: usize, t: usize| (c << (n - 1 - cq)) | (t << (n - 1 - cat));
            let r = std::f64::consts::FRAC_1_SQRT_2;
            assert!((amps[idx(0, 0)] - Amplitude::new(r, 0.0)).norm() < 1e-12);
            assert!((amps[idx(1, 1)] - Amplitude::new(r, 0.0)).norm() < 1e-12);
            assert!(amps[idx(0, 1)].norm() < 1e-12 && amps[idx(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn remote_cz_on_plus_states() {
        let mut f = fabric(2, 2, 4);
        let c = f.plan().logical(0, 0).unwrap();
        let t = f.plan().logical(1, 0).unwrap();
        f.apply(&Gate::H(c)).unwrap();
        f.apply(&Gate::H(t)).unwrap();
        let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
        h.controlled_phase(&mut f, t, PI).unwrap();
        h.disentangle(&mut f).unwrap();
        let expected = StateVector::from_amplitudes(
            [1.0, 1.0, 1.0, -1.0].map(|x| Amplitude::new(x, 0.0)).to_vec(),
        )
        .unwrap();
        let got = f.logical_state().unwrap();
        assert!(got.equal_up_to_global_phase(&expected, 1e-12).unwrap());
    }

    #[test]
    fn control_off_leaves_target_alone() {
        let mut f = fabric(2, 2, 2);
        let c = f.plan().logical(0, 0).unwrap();
        let t = f.plan().logical(1, 0).unwrap();
        f.apply(&Gate::H(t)).unwrap();
        let before = f.logical_state().unwrap();
        let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
        h.controlled_phase(&mut f, t, 1.234).unwrap();
        h.disentangle(&mut f).unwrap();
        assert!(f.logical_state().unwrap().equal_up_to_global_phase(&before, 1e-12).unwrap());
    }

    #[test]
    fn round_trip_without_gates_is_identity() {
        let mut f = fabric(3, 2, 9);
        let start = random_logical(3, 42);
        f.load_logical_state(&start).unwrap();
        let before = f.state().clone();
        let control = f.plan().logical(0, 0).unwrap();
        let mut h = CatHandle::entangle(&mut f, control, 1).unwrap();
        h.disentangle(&mut f).unwrap();
        assert!(f.state().equal_up_to_global_phase(&before, 1e-10).unwrap());
    }

    #[test]
    fn session_resources_are_fixed() {
        let mut f = fabric(4, 2, 3);
        let c = f.plan().logical(0, 0).unwrap();
        let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
        assert!(f.comm_busy(1) && !f.comm_busy(0));
        for local in 0..2 {
            let t = f.plan().logical(1, local).unwrap();
            h.controlled_phase(&mut f, t, 0.5).unwrap();
        }
        h.disentangle(&mut f).unwrap();
        let counters = f.counters();
        assert_eq!(counters.epr_created, 1);
        assert_eq!(counters.classical_messages, 2);
        assert_eq!(counters.midcircuit_measurements, 2);
        assert_eq!(counters.current_tick, 2);
        assert!(!f.comm_busy(1));
        assert_eq!(f.messages_in_flight(), 0);
    }

    #[test]
    fn misuse_is_rejected() {
        let mut f = fabric(4, 2, 3);
        let c = f.plan().logical(0, 0).unwrap();
        assert!(CatHandle::entangle(&mut f, c, 0).is_err());
        let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
        let wrong = f.plan().logical(0, 1).unwrap();
        assert!(h.controlled_phase(&mut f, wrong, 0.1).is_err());
        let other = f.plan().logical(0, 1).unwrap();
        assert!(matches!(
            CatHandle::entangle(&mut f, other, 1),
            Err(Error::CommSlotBusy(1))
        ));
        h.disentangle(&mut f).unwrap();
        assert!(h.disentangle(&mut f).is_err());
        let t = f.plan().logical(1, 0).unwrap();
        assert!(h.controlled_phase(&mut f, t, 0.1).is_err());
    }

    #[test]
    fn comm_qubits_end_factorized() {
        let mut f = fabric(3, 2, 5);
        f.load_logical_state(&random_logical(3, 8)).unwrap();
        let c = f.plan().logical(0, 0).unwrap();
        let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
        let t = f.plan().logical(1, 1).unwrap();
        h.controlled_phase(&mut f, t, 0.9).unwrap();
        h.disentangle(&mut f).unwrap();
        let before = f.state().clone();
        for node in 0..2 {
            let comm = f.plan().comm(node).unwrap();
            f.reset(comm).unwrap();
        }
        assert!((f.state().overlap_sqr(&before).unwrap() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn remote_cp_matches_direct(state_seed in any::<u64>(), rng_seed in any::<u64>()) {
            let start = random_logical(2, state_seed);
            let mut direct = start.clone();
            direct.apply(&Gate::CP(0, 1, FRAC_PI_4)).unwrap();

            let mut f = fabric(2, 2, rng_seed);
            f.load_logical_state(&start).unwrap();
            let c = f.plan().logical(0, 0).unwrap();
            let t = f.plan().logical(1, 0).unwrap();
            let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
            h.controlled_phase(&mut f, t, FRAC_PI_4).unwrap();
            h.disentangle(&mut f).unwrap();
            prop_assert!(f.logical_state().unwrap().equal_up_to_global_phase(&direct, 1e-10).unwrap());
        }

        #[test]
        fn all_branches_match_direct_gates(
            state_seed in any::<u64>(),
            phases in proptest::collection::vec(-PI..PI, 1..3),
        ) {
            // control on node 0, one or two targets on node 1: at most 5 qubits
            let n = 1 + phases.len();
            let start = random_logical(n, state_seed);
            let mut direct = start.clone();
            for (j, &phi) in phases.iter().enumerate() {
                direct.apply(&Gate::CP(0, j + 1, phi)).unwrap();
            }
            for branch in 0..4u8 {
                let mut f = Fabric::new(
                    PartitionPlan::new(n, 2).unwrap(),
                    FabricConfig::default(),
                    ChaCha8Rng::seed_from_u64(0),
                ).unwrap();
                f.load_logical_state(&start).unwrap();
                f.force_outcomes([branch & 1, branch >> 1]);
                let c = f.plan().logical(0, 0).unwrap();
                let mut h = CatHandle::entangle(&mut f, c, 1).unwrap();
                for (j, &phi) in phases.iter().enumerate() {
                    let t = f.plan().logical(1, j).unwrap();
                    h.controlled_phase(&mut f, t, phi).unwrap();
                }
                h.disentangle(&mut f).unwrap();
                prop_assert!(f.logical_state().unwrap().equal_up_to_global_phase(&direct, 1e-10).unwrap());
            }
        }
    }
}
