//! Fourier-state preparation, the swap-free inverse QFT, the distributed
//! schedule and the three ways of running it.
//!
//! Ordering: for an ordered register `q_0, ..., q_{n-1}`, Fourier
//! preparation puts the phase `e^{2πi θ 2^{n-1-j}}` on `q_j`. With
//! `θ = x / 2^n` that is exactly `QFT|x⟩` with `q_0` as the most significant
//! qubit. The swap-free inverse QFT then leaves bit `j` of `x` (counting
//! from the least significant bit) on `q_j`, so the measured string
//! `b_0 ... b_{n-1}` reads `x` once reversed.

pub(crate) mod run;
mod schedule;
mod semiclassical;

use std::f64::consts::TAU;

pub use run::{run_distributed, run_monolithic_reference, run_semiclassical, Mode, RunOptions, RunOutput};
pub use schedule::{build_schedule, gate_multiset, Block, DistributedSchedule, GradientBlock, GradientGate, ScheduledBlock};
pub use semiclassical::semiclassical_exact_distribution;

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

/// Encoded Fourier phase as a fraction of a full turn, in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self(theta))
    }

    /// `j / 2^n`, exactly representable.
    pub fn dyadic(j: u64, n: usize) -> Result<Self> {
        Self::new(j as f64 / (1u64 << n) as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Phase, in radians, carried by the qubit with weight `2^power`.
    pub fn qubit_phase(self, power: usize) -> f64 {
        let turns = (self.0 * 2f64.powi(power as i32)).fract();
        TAU * turns
    }
}

/// Angle of the inverse-QFT controlled phase between qubits `d - 1`
/// positions apart: `-2π / 2^d`.
pub fn gradient_angle(d: u32) -> f64 {
    -TAU / 2f64.powi(d as i32)
}

/// Gates preparing the Fourier state on `qubits`. `n_total` is the size of
/// the whole register and `first` the position of `qubits[0]` within it, so
/// each node can prepare its own slice.
pub fn fourier_prep_gates(qubits: &[usize], first: usize, n_total: usize, theta: PhaseAngle) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(2 * qubits.len());
    for (i, &q) in qubits.iter().enumerate() {
        gates.push(Gate::H(q));
        let phase = theta.qubit_phase(n_total - 1 - (first + i));
        if phase != 0.0 {
            gates.push(Gate::P(q, phase));
        }
    }
    gates
}

/// Prepares the Fourier state of `theta` on the ordered `qubits`.
pub fn fourier_prep(state: &mut StateVector, qubits: &[usize], theta: PhaseAngle) -> Result<()> {
    distinct(qubits)?;
    state.apply_all(&fourier_prep_gates(qubits, 0, qubits.len(), theta))
}

/// Swap-free inverse QFT gate list: for each qubit in order, the controlled
/// phases from every earlier qubit, then a Hadamard.
pub fn inverse_qft_gates(qubits: &[usize]) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(qubits.len() * (qubits.len() + 1) / 2);
    for (j, &target) in qubits.iter().enumerate() {
        for (l, &control) in qubits[..j].iter().enumerate() {
            gates.push(Gate::CP(control, target, gradient_angle((j - l + 1) as u32)));
        }
        gates.push(Gate::H(target));
    }
    gates
}

pub fn inverse_qft_local(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    distinct(qubits)?;
    state.apply_all(&inverse_qft_gates(qubits))
}

fn distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::DuplicateOperand(*q));
        }
    }
    Ok(())
}

/// Integer formed by reading `raw_bits` in reverse order.
pub fn rev_postprocess(raw_bits: &[u8]) -> u64 {
    raw_bits
        .iter()
        .rev()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

/// Measured output register before and after bit reversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasuredOutcome {
    pub raw_bits: Vec<u8>,
    pub value: u64,
}

impl MeasuredOutcome {
    pub fn from_raw(raw_bits: Vec<u8>) -> Self {
        let value = rev_postprocess(&raw_bits);
        Self { raw_bits, value }
    }

    /// Parses a `'0'`/`'1'` string such as the keys of
    /// [`StateVector::sample_counts`].
    pub fn parse(bits: &str) -> Result<Self> {
        let raw = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Protocol(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        if raw.is_empty() {
            return Err(Error::EmptyQubitList);
        }
        Ok(Self::from_raw(raw))
    }
}

/// Output value of the register basis state `index` (qubit 0 most
/// significant): the `n`-bit reversal of `index`.
pub fn value_of_index(index: usize, n: usize) -> u64 {
    (index.reverse_bits() >> (usize::BITS as usize - n)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Amplitude;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Column `x` of the unitary DFT matrix, `e^{2πi x k / N} / √N`.
    fn dft_column(x: f64, n: usize) -> StateVector {
        let len = 1usize << n;
        let amps = (0..len)
            .map(|k| Amplitude::from_polar(1.0, TAU * x * k as f64 / len as f64))
            .collect();
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn zero_phase_gives_plus_states() {
        let mut s = StateVector::new(3).unwrap();
        fourier_prep(&mut s, &[0, 1, 2], PhaseAngle::new(0.0).unwrap()).unwrap();
        let plus = 1.0 / 8f64.sqrt();
        assert!(s.amplitudes().iter().all(|a| (a - Amplitude::new(plus, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn half_phase_one_qubit() {
        let mut s = StateVector::new(1).unwrap();
        fourier_prep(&mut s, &[0], PhaseAngle::new(0.5).unwrap()).unwrap();
        assert!((s.amplitudes()[0] - Amplitude::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - Amplitude::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fourier_state_is_dft_column() {
        let mut s = StateVector::new(4).unwrap();
        fourier_prep(&mut s, &[0, 1, 2, 3], PhaseAngle::new(5.0 / 16.0).unwrap()).unwrap();
        assert!(s.equal_up_to_global_phase(&dft_column(5.0, 4), 1e-12).unwrap());
        let mut t = StateVector::new(4).unwrap();
        fourier_prep(&mut t, &[0, 1, 2, 3], PhaseAngle::new(1.0 / 3.0).unwrap()).unwrap();
        assert!(t.equal_up_to_global_phase(&dft_column(16.0 / 3.0, 4), 1e-12).unwrap());
    }

    #[test]
    fn single_qubit_inverse_qft_is_hadamard() {
        assert_eq!(inverse_qft_gates(&[3]), vec![Gate::H(3)]);
    }

    #[test]
    fn inverse_qft_recovers_every_dyadic_phase() {
        for j in 0..16u64 {
            let mut s = StateVector::new(4).unwrap();
            fourier_prep(&mut s, &[0, 1, 2, 3], PhaseAngle::dyadic(j, 4).unwrap()).unwrap();
            inverse_qft_local(&mut s, &[0, 1, 2, 3]).unwrap();
            let probs = s.marginal_probabilities(&[0, 1, 2, 3]).unwrap();
            let (idx, p) = probs
                .iter()
                .copied()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!((p - 1.0).abs() < 1e-10, "j = {j}");
            assert_eq!(value_of_index(idx, 4), j);
        }
    }

    #[test]
    fn zero_phase_measures_all_zero() {
        let mut s = StateVector::new(5).unwrap();
        let q = [0, 1, 2, 3, 4];
        fourier_prep(&mut s, &q, PhaseAngle::new(0.0).unwrap()).unwrap();
        inverse_qft_local(&mut s, &q).unwrap();
        assert!((s.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversal() {
        assert_eq!(rev_postprocess(&[0, 0, 0, 0]), 0);
        assert_eq!(rev_postprocess(&[1, 0, 0, 0]), 1);
        assert_eq!(rev_postprocess(&[0, 0, 0, 1]), 8);
        assert_eq!(MeasuredOutcome::parse("1000").unwrap().value, 1);
        assert!(MeasuredOutcome::parse("10a").is_err());
        for x in 0..16u64 {
            let raw: Vec<u8> = (0..4).map(|b| (x >> (3 - b) & 1) as u8).collect();
            let once = rev_postprocess(&raw);
            let back: Vec<u8> = (0..4).map(|b| (once >> (3 - b) & 1) as u8).collect();
            assert_eq!(rev_postprocess(&back), x);
        }
        assert_eq!(value_of_index(0b0001, 4), 0b1000);
        assert_eq!(value_of_index(0b0110, 4), 0b0110);
    }

    #[test]
    fn theta_range() {
        assert!(PhaseAngle::new(1.0).is_err());
        assert!(PhaseAngle::new(-0.1).is_err());
        assert!(PhaseAngle::new(f64::NAN).is_err());
    }
}
