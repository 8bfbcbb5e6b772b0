// One cat-entangler / disentangler session applying two remote controlled
// phases, checked against the same gates applied directly.

use std::f64::consts::PI;

use dqc_emu::{CatHandle, Fabric, FabricConfig, Gate, PartitionPlan, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // qubit 0 on node 0, qubits 1 and 2 on node 1
    let plan = PartitionPlan::new(3, 2)?;
    let mut start = StateVector::new(3)?;
    start.apply_all(&[Gate::H(0), Gate::H(1), Gate::H(2), Gate::P(0, 0.3)])?;

    let mut direct = start.clone();
    direct.apply_all(&[Gate::CP(0, 1, PI / 2.0), Gate::CP(0, 2, PI / 4.0)])?;

    for seed in 0..4 {
        let mut fabric = Fabric::new(plan.clone(), FabricConfig::default(), ChaCha8Rng::seed_from_u64(seed))?;
        fabric.load_logical_state(&start)?;
        let mut cat = CatHandle::entangle(&mut fabric, plan.logical(0, 0)?, 1)?;
        cat.controlled_phase(&mut fabric, plan.logical(1, 0)?, PI / 2.0)?;
        cat.controlled_phase(&mut fabric, plan.logical(1, 1)?, PI / 4.0)?;
        cat.disentangle(&mut fabric)?;
        let same = fabric.logical_state()?.equal_up_to_global_phase(&direct, 1e-10)?;
        println!("seed {seed}: matches direct gates: {same}, {:?}", fabric.counters());
        assert!(same);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("telegate example failed");
}
