// A small sweep written to a temporary CSV, then resumed.

use dqc_emu::harness::{run_sweep, SweepConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = SweepConfig::parse(
        "num_qubits: [4, 6, 8]\n\
         nodes: [1, 2, 4, 8]\n\
         theta: [0.0, 0.333333]\n\
         modes: [telegate, semiclassical]\n\
         shots: 50\n\
         seed: 1\n",
    )?;
    cfg.output_path = dir.path().join("sweep.csv");
    println!("{} rows expected", cfg.expected_rows());

    let report = run_sweep(&cfg)?;
    report.write_summary(&mut std::io::stdout())?;
    let again = run_sweep(&cfg)?;
    println!("second pass: {} new, {} skipped", again.new_rows.len(), again.skipped);

    let text = std::fs::read_to_string(&cfg.output_path)?;
    for line in text.lines().take(3) {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sweep example failed");
}
