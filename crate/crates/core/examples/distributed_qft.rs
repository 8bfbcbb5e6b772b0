// Distributed inverse QFT on a non-representable phase, next to the
// monolithic reference.

use dqc_emu::{run_distributed, run_monolithic_reference, Mode, PartitionPlan, PhaseAngle, RunOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, k) = (8, 4);
    let theta = PhaseAngle::new(1.0 / 3.0)?;
    let opts = RunOptions::new(200, 42);

    let mono = run_monolithic_reference(n, theta, &opts)?;
    let dist = run_distributed(&PartitionPlan::new(n, k)?, theta, Mode::Telegate, &opts)?;

    let mut top: Vec<(u64, f64)> = dist.exact.iter().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most likely outcomes of theta = 1/3 on {n} qubits:");
    for (v, p) in top.iter().take(4) {
        let sampled = dist.counts.get(v).copied().unwrap_or(0);
        println!("  {v:>3} = {v:08b}  x/2^n = {:.6}  p = {p:.6}  sampled {sampled}", *v as f64 / 256.0);
    }
    let m = &dist.metrics;
    println!(
        "epr {} messages {} slots {} peak {} B, exact fidelity {}, sampled {:.4}",
        m.epr_count,
        m.classical_msg_count,
        m.block_slots,
        m.peak_state_bytes,
        m.fidelity_vs_reference,
        dist.sampled_fidelity()?
    );
    // With one node there is nothing to teleport, and the seed reproduces
    // the monolithic samples exactly.
    let single = run_distributed(&PartitionPlan::new(n, 1)?, theta, Mode::Telegate, &opts)?;
    println!("k = 1 draws the monolithic samples: {}", mono.counts == single.counts);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("distributed QFT example failed");
}
