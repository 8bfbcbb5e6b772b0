// Build a Bell pair on a bare statevector and sample it.

use dqc_emu::{Gate, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut state = StateVector::new(2)?;
    state.apply_all(&[Gate::H(0), Gate::CNOT(0, 1)])?;
    println!("amplitudes: {:?}", state.amplitudes());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let counts = state.sample_counts(&[0, 1], 1000, &mut rng)?;
    println!("1000 shots: {counts:?}");
    assert!(counts.keys().all(|k| k == "00" || k == "11"));

    // Mid-circuit measurement collapses both qubits.
    let bit = state.measure(0, &mut rng)?;
    let (p0, p1) = state.outcome_probabilities(1)?;
    println!("measured {bit} on qubit 0, qubit 1 now has P(0)={p0} P(1)={p1}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("statevector example failed");
}
