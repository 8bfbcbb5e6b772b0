// Partition plans, their block schedule and the EPR budget.

use dqc_emu::qft::{build_schedule, Block};
use dqc_emu::{epr_budget, naive_epr_budget, PartitionPlan};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (n, k) in [(8, 1), (8, 2), (8, 4), (10, 4), (12, 8)] {
        let plan = PartitionPlan::new(n, k)?;
        let schedule = build_schedule(&plan);
        println!(
            "n={n:>2} k={k}: sizes {:?}, {} slots, {} blocks, {} EPR pairs (naive {})",
            plan.sizes(),
            schedule.slot_count(),
            schedule.block_count(),
            epr_budget(&plan),
            naive_epr_budget(n),
        );
    }

    let plan = PartitionPlan::new(8, 4)?;
    for sb in build_schedule(&plan).blocks() {
        match &sb.block {
            Block::LocalInverseQft { node } => println!("slot {}: local inverse QFT on node {node}", sb.slot),
            Block::Gradient(g) => println!(
                "slot {}: gradient node {} -> node {}, {} gates, controls {:?}",
                sb.slot,
                g.control_node,
                g.target_node,
                g.gates.len(),
                g.controls()
            ),
        }
    }

    match PartitionPlan::new(4, 8) {
        Err(e) => println!("n=4 k=8 rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("partition example failed");
}
