//! Desk-scale emulator for distributed quantum computing.
//!
//! `k` simulated nodes share one dense statevector. A distributed inverse
//! QFT runs across them with cat-entangler/disentangler gate teleportation
//! (or, alternatively, early measurement with classical feed-forward), is
//! checked against a monolithic reference and is measured for wall time,
//! state memory, EPR pairs and classical messages.
//!
//! Modules, bottom up:
//!
//! * [`statevector`]: gate kernels, measurement, sampling.
//! * [`fabric`]: partitioning, locality enforcement, EPR source, classical
//!   channels and resource counters.
//! * [`telegate`]: the cat-entangler / cat-disentangler session.
//! * [`qft`]: Fourier-state preparation, the distributed schedule and the
//!   run pipelines.
//! * [`metrics`]: classical fidelity, EPR budgets, run measurements.
//! * [`harness`]: sweep configuration, CSV results and the verification
//!   suite behind the `dqc-bench` binary.

pub mod error;
pub mod fabric;
pub mod harness;
pub mod metrics;
pub mod qft;
pub mod statevector;
pub mod telegate;

pub use error::{Error, Result};
pub use fabric::{Fabric, FabricConfig, PartitionPlan, QubitAddr};
pub use metrics::{classical_fidelity, epr_budget, naive_epr_budget, Distribution, RunMetrics};
pub use qft::{run_distributed, run_monolithic_reference, run_semiclassical, Mode, PhaseAngle, RunOptions, RunOutput};
pub use statevector::{Gate, StateVector};
pub use telegate::CatHandle;
