// The network fabric on its own: EPR allocation, locality enforcement and
// latency-delayed classical messages.

use dqc_emu::fabric::MessageTag;
use dqc_emu::{Fabric, FabricConfig, Gate, PartitionPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let plan = PartitionPlan::new(4, 2)?;
    let config = FabricConfig { latency: 3, ..FabricConfig::default() };
    let mut fabric = Fabric::new(plan.clone(), config, ChaCha8Rng::seed_from_u64(1))?;
    println!("{} logical + {} comm qubits", plan.n(), plan.total_qubits() - plan.n());

    let a0 = plan.logical(0, 0)?;
    let b0 = plan.logical(1, 0)?;
    match fabric.apply(&Gate::CNOT(a0, b0)) {
        Err(e) => println!("direct cross-node gate refused: {e}"),
        Ok(()) => unreachable!(),
    }

    let (ea, eb) = fabric.allocate_epr(0, 1)?;
    println!("EPR pair on {ea:?} and {eb:?}");
    let bit = fabric.measure(ea)?;
    fabric.send_classical(0, 1, MessageTag::CatEntangle, bit)?;
    println!("in flight: {}, early receive: {:?}", fabric.messages_in_flight(), fabric.receive(0, 1));
    let msg = fabric.await_message(0, 1)?;
    println!("delivered {msg:?}");
    println!("counters: {:?}", fabric.counters());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fabric example failed");
}
