// Teleportation-free mode: measure early and forward bits classically.

use dqc_emu::qft::semiclassical_exact_distribution;
use dqc_emu::{run_distributed, Mode, PartitionPlan, PhaseAngle, RunOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let plan = PartitionPlan::new(6, 3)?;
    let theta = PhaseAngle::new(2.0 / 3.0)?;
    let out = run_distributed(&plan, theta, Mode::Semiclassical, &RunOptions::new(100, 3))?;
    println!("counts: {:?}", out.counts);
    println!(
        "per execution: {} EPR, {} messages, {} mid-circuit measurements, peak {} B",
        out.metrics.epr_count, out.metrics.classical_msg_count, out.metrics.midcircuit_measurements, out.metrics.peak_state_bytes
    );
    let exact = semiclassical_exact_distribution(&plan, theta)?;
    println!("mode {:?}, max deviation from reference {:.2e}", exact.mode(), exact.max_abs_diff(&out.reference));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("semiclassical example failed");
}
