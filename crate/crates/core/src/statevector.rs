//! Dense statevector engine.
//!
//! Qubit 0 is the most significant bit of a basis-state index: in an
//! `n`-qubit state, qubit `q` corresponds to the bit `1 << (n - 1 - q)`.
//! Bitstrings produced by this module list qubits in the order requested,
//! leftmost character first.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// One complex amplitude.
pub type Amplitude = Complex64;

/// Largest state the engine will allocate.
pub const MAX_QUBITS: usize = 30;

/// The gate set needed by the distributed inverse QFT and the cat protocol.
///
/// `Q` is the qubit address type: plain global indices for [`StateVector`],
/// node-local addresses for the fabric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<Q = usize> {
    H(Q),
    X(Q),
    Z(Q),
    /// Phase gate `diag(1, e^{iφ})`.
    P(Q, f64),
    /// Controlled phase `diag(1, 1, 1, e^{iφ})`, control first.
    CP(Q, Q, f64),
    /// Controlled NOT, control first.
    CNOT(Q, Q),
}

impl<Q: Copy> Gate<Q> {
    pub fn operands(&self) -> Vec<Q> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::P(q, _) => vec![q],
            Gate::CP(a, b, _) | Gate::CNOT(a, b) => vec![a, b],
        }
    }

    pub fn map_qubits<R, F>(&self, mut f: F) -> Result<Gate<R>>
    where
        F: FnMut(Q) -> Result<R>,
    {
        Ok(match *self {
            Gate::H(q) => Gate::H(f(q)?),
            Gate::X(q) => Gate::X(f(q)?),
            Gate::Z(q) => Gate::Z(f(q)?),
            Gate::P(q, phi) => Gate::P(f(q)?, phi),
            Gate::CP(a, b, phi) => Gate::CP(f(a)?, f(b)?, phi),
            Gate::CNOT(a, b) => Gate::CNOT(f(a)?, f(b)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// The all-zero basis state `|0...0⟩`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::InvalidQubitCount {
                got: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(Error::QubitOutOfRange {
                index,
                num_qubits,
            });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); len];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an amplitude vector. The vector is renormalized; it must have a
    /// power-of-two length and nonzero norm.
    pub fn from_amplitudes(mut amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::InvalidQubitCount {
                got: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "amplitude norm {norm} cannot be normalized"
            )));
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Bytes held by the amplitude array (16 per double-precision complex).
    pub fn allocated_bytes(&self) -> u64 {
        (self.amps.len() * std::mem::size_of::<Amplitude>()) as u64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1usize << (self.num_qubits - 1 - qubit))
    }

    fn pair_masks(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        let ma = self.mask(a)?;
        let mb = self.mask(b)?;
        if a == b {
            return Err(Error::DuplicateOperand(a));
        }
        Ok((ma, mb))
    }

    /// Applies a gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::H(q) => {
                let stride = self.mask(q)?;
                for chunk in self.amps.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = (x + y) * FRAC_1_SQRT_2;
                        *b = (x - y) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::X(q) => {
                let stride = self.mask(q)?;
                for chunk in self.amps.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    lo.swap_with_slice(hi);
                }
            }
            Gate::Z(q) => self.scale_ones(self.mask(q)?, Amplitude::new(-1.0, 0.0)),
            Gate::P(q, phi) => self.scale_ones(self.mask(q)?, Amplitude::from_polar(1.0, phi)),
            Gate::CP(c, t, phi) => {
                let (mc, mt) = self.pair_masks(c, t)?;
                self.scale_ones(mc | mt, Amplitude::from_polar(1.0, phi));
            }
            Gate::CNOT(c, t) => {
                let (mc, mt) = self.pair_masks(c, t)?;
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiplies every amplitude whose index has all bits of `mask` set.
    fn scale_ones(&mut self, mask: usize, factor: Amplitude) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= factor;
            }
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Probabilities `(p0, p1)` of measuring `qubit`.
    pub fn outcome_probabilities(&self, qubit: usize) -> Result<(f64, f64)> {
        let mask = self.mask(qubit)?;
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0, p1))
    }

    /// Measures `qubit` in the computational basis and collapses the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<u8> {
        let (p0, p1) = self.outcome_probabilities(qubit)?;
        if p0 < 1e-12 && p1 < 1e-12 {
            return Err(Error::CorruptState { qubit });
        }
        let u: f64 = rng.gen();
        let bit = if u * (p0 + p1) < p0 { 0 } else { 1 };
        let p = if bit == 0 { p0 } else { p1 };
        self.collapse(qubit, bit, p)?;
        Ok(bit)
    }

    /// Projects `qubit` onto `bit` and renormalizes. Returns the probability
    /// the outcome had. Fails if that probability is below 1e-12.
    pub fn project(&mut self, qubit: usize, bit: u8) -> Result<f64> {
        let (p0, p1) = self.outcome_probabilities(qubit)?;
        let p = if bit == 0 { p0 } else { p1 };
        if p < 1e-12 {
            return Err(Error::ImpossibleOutcome { qubit, bit });
        }
        self.collapse(qubit, bit, p)?;
        Ok(p)
    }

    fn collapse(&mut self, qubit: usize, bit: u8, p: f64) -> Result<()> {
        let mask = self.mask(qubit)?;
        let keep = if bit == 0 { 0 } else { mask };
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *a *= scale;
            } else {
                *a = Amplitude::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    /// Measures `qubit` and flips it back to `|0⟩` if the outcome was 1.
    pub fn reset<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<u8> {
        let bit = self.measure(qubit, rng)?;
        if bit == 1 {
            self.apply(&Gate::X(qubit))?;
        }
        Ok(bit)
    }

    /// Marginal distribution over `qubits`. Entry `v` is the probability of
    /// the pattern whose bit `len - 1 - j` is the value of `qubits[j]`.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::EmptyQubitList);
        }
        let masks = qubits
            .iter()
            .map(|&q| self.mask(q))
            .collect::<Result<Vec<_>>>()?;
        let width = qubits.len();
        let mut probs = vec![0.0; 1usize << width];
        for (i, a) in self.amps.iter().enumerate() {
            let mut pattern = 0usize;
            for &m in &masks {
                pattern = (pattern << 1) | usize::from(i & m != 0);
            }
            probs[pattern] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Samples `shots` measurements of `qubits` without disturbing the state.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: usize,
        rng: &mut R,
    ) -> Result<BTreeMap<String, usize>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.marginal_probabilities(qubits)?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let width = qubits.len();
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u = rng.gen::<f64>() * acc;
            let pattern = cumulative
                .partition_point(|&c| c <= u)
                .min(probs.len() - 1);
            *counts.entry(bitstring(pattern, width)).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// True iff some unit-modulus `c` gives `max_i |self_i - c * other_i| <= tol`.
    ///
    /// `c` is taken from the largest-magnitude amplitude of `other`.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let (pivot, b) = other
            .amps
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
            .expect("state is never empty");
        let a = self.amps[pivot];
        let c = if a.norm() == 0.0 {
            Amplitude::new(1.0, 0.0)
        } else {
            let ratio = a / b;
            ratio / ratio.norm()
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .all(|(x, y)| (x - c * y).norm() <= tol))
    }

    /// Squared overlap `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &StateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let ip: Amplitude = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum();
        Ok(ip.norm_sqr())
    }

    /// Keeps the leading `keep` qubits, assuming every trailing qubit is in
    /// `|0⟩`. Returns the dropped probability mass alongside the reduced state.
    pub fn truncate_trailing(&self, keep: usize) -> Result<(StateVector, f64)> {
        if keep == 0 || keep > self.num_qubits {
            return Err(Error::InvalidQubitCount {
                got: keep,
                max: self.num_qubits,
            });
        }
        let shift = self.num_qubits - keep;
        let mut leaked = 0.0;
        let mut amps = Vec::with_capacity(1 << keep);
        for (i, a) in self.amps.iter().enumerate() {
            if i & ((1 << shift) - 1) == 0 {
                amps.push(*a);
            } else {
                leaked += a.norm_sqr();
            }
        }
        Ok((StateVector::from_amplitudes(amps)?, leaked))
    }

    /// Projects `qubit` onto `bit` and removes it, returning the outcome
    /// probability and the normalized remainder (`None` if the outcome has
    /// probability zero or the state has one qubit).
    pub fn split_off(&self, qubit: usize, bit: u8) -> Result<(f64, Option<StateVector>)> {
        let mask = self.mask(qubit)?;
        let keep = if bit == 0 { 0 } else { mask };
        let mut reduced = Vec::with_capacity(self.amps.len() / 2);
        let mut p = 0.0;
        // Removing a bit preserves relative order, so the kept amplitudes are
        // already in index order of the reduced register.
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == keep {
                p += a.norm_sqr();
                reduced.push(*a);
            }
        }
        if self.num_qubits == 1 || p == 0.0 {
            return Ok((p, None));
        }
        Ok((p, Some(StateVector::from_amplitudes(reduced)?)))
    }
}

/// Renders the low `width` bits of `pattern`, most significant first.
pub fn bitstring(pattern: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if pattern >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: Amplitude, re: f64, im: f64) -> bool {
        (a - Amplitude::new(re, im)).norm() < 1e-12
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| Amplitude::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn phase_gate_definition() {
        let phi = 0.7;
        let mut one = StateVector::basis(1, 1).unwrap();
        one.apply(&Gate::P(0, phi)).unwrap();
        assert!(close(one.amplitudes()[1], phi.cos(), phi.sin()));
        let mut zero = StateVector::new(1).unwrap();
        zero.apply(&Gate::P(0, phi)).unwrap();
        assert!(close(zero.amplitudes()[0], 1.0, 0.0));
    }

    #[test]
    fn controlled_phase_pi_flips_only_11() {
        for idx in 0..4 {
            let mut s = StateVector::basis(2, idx).unwrap();
            s.apply(&Gate::CP(0, 1, PI)).unwrap();
            let expected = if idx == 3 { -1.0 } else { 1.0 };
            assert!(close(s.amplitudes()[idx], expected, 0.0), "index {idx}");
        }
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let mut s = StateVector::new(3).unwrap();
        s.apply(&Gate::X(0)).unwrap();
        assert!(close(s.amplitudes()[0b100], 1.0, 0.0));
        s.apply(&Gate::CNOT(0, 2)).unwrap();
        assert!(close(s.amplitudes()[0b101], 1.0, 0.0));
    }

    #[test]
    fn operand_errors() {
        let mut s = StateVector::new(2).unwrap();
        assert_eq!(
            s.apply(&Gate::H(2)),
            Err(Error::QubitOutOfRange {
                index: 2,
                num_qubits: 2
            })
        );
        assert_eq!(s.apply(&Gate::CNOT(1, 1)), Err(Error::DuplicateOperand(1)));
        assert_eq!(s.apply(&Gate::CP(0, 0, 1.0)), Err(Error::DuplicateOperand(0)));
        assert!(StateVector::new(0).is_err());
    }

    #[test]
    fn measure_symmetric_superposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ones = 0;
        for _ in 0..4000 {
            let mut s = StateVector::new(1).unwrap();
            s.apply(&Gate::H(0)).unwrap();
            let bit = s.measure(0, &mut rng).unwrap();
            ones += bit as usize;
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(close(s.amplitudes()[bit as usize], 1.0, 0.0));
        }
        assert!((ones as f64 / 4000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn measure_basis_state_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(s.measure(0, &mut rng).unwrap(), 1);
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn bell_measurements_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 2];
        for i in 0..2000 {
            let mut s = StateVector::new(2).unwrap();
            s.apply(&Gate::H(0)).unwrap();
            s.apply(&Gate::CNOT(0, 1)).unwrap();
            let (first, second) = if i % 2 == 0 { (0, 1) } else { (1, 0) };
            let a = s.measure(first, &mut rng).unwrap();
            let b = s.measure(second, &mut rng).unwrap();
            assert_eq!(a, b);
            seen[a as usize] += 1;
        }
        assert!((seen[0] as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn corrupt_state_is_reported() {
        let mut s = StateVector::new(1).unwrap();
        s.amps[0] = Amplitude::new(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(s.measure(0, &mut rng), Err(Error::CorruptState { qubit: 0 }));
    }

    #[test]
    fn reset_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut one = StateVector::basis(1, 1).unwrap();
        one.reset(0, &mut rng).unwrap();
        assert_eq!(one, StateVector::new(1).unwrap());
        for _ in 0..20 {
            let mut plus = StateVector::new(1).unwrap();
            plus.apply(&Gate::H(0)).unwrap();
            plus.reset(0, &mut rng).unwrap();
            assert!(close(plus.amplitudes()[0], 1.0, 0.0));
            assert!((plus.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_counts_basis_and_superposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zero = StateVector::new(2).unwrap();
        let counts = zero.sample_counts(&[0, 1], 100, &mut rng).unwrap();
        assert_eq!(counts, BTreeMap::from([("00".to_string(), 100)]));

        let mut s = StateVector::new(2).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        let counts = s.sample_counts(&[0, 1], 10_000, &mut rng).unwrap();
        assert_eq!(counts.values().sum::<usize>(), 10_000);
        assert_eq!(counts.len(), 2);
        for key in ["00", "10"] {
            assert!((counts[key] as f64 / 10_000.0 - 0.5).abs() < 0.05);
        }
        assert_eq!(s.sample_counts(&[], 1, &mut rng), Err(Error::EmptyQubitList));
        assert_eq!(s.sample_counts(&[0], 0, &mut rng), Err(Error::ZeroShots));
    }

    #[test]
    fn marginal_order_follows_qubit_list() {
        let s = StateVector::basis(3, 0b011).unwrap();
        let p = s.marginal_probabilities(&[2, 0]).unwrap();
        assert_eq!(p, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn global_phase_comparison() {
        let a = StateVector::basis(2, 0b01).unwrap();
        let mut b = a.clone();
        for amp in &mut b.amps {
            *amp *= Amplitude::from_polar(1.0, PI / 7.0);
        }
        assert!(a.equal_up_to_global_phase(&b, 1e-10).unwrap());
        let c = StateVector::basis(2, 0b10).unwrap();
        assert!(!a.equal_up_to_global_phase(&c, 1e-10).unwrap());
        let d = StateVector::new(3).unwrap();
        assert!(a.equal_up_to_global_phase(&d, 1e-10).is_err());
    }

    #[test]
    fn split_off_removes_qubit() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        s.apply(&Gate::X(1)).unwrap();
        let (p, rest) = s.split_off(0, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(rest.unwrap(), StateVector::basis(1, 1).unwrap());
        let (p, rest) = s.split_off(1, 0).unwrap();
        assert_eq!(p, 0.0);
        assert!(rest.is_none());
    }

    fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        let pair = (0..n, 0..n - 1).prop_map(|(a, b)| (a, if b >= a { b + 1 } else { b }));
        prop_oneof![
            q.clone().prop_map(Gate::H),
            q.clone().prop_map(Gate::X),
            q.clone().prop_map(Gate::Z),
            (q, -PI..PI).prop_map(|(q, p)| Gate::P(q, p)),
            (pair.clone(), -PI..PI).prop_map(|((a, b), p)| Gate::CP(a, b, p)),
            pair.prop_map(|(a, b)| Gate::CNOT(a, b)),
        ]
    }

    proptest! {
        #[test]
        fn norm_is_preserved(seed in any::<u64>(), gates in proptest::collection::vec(gate_strategy(4), 1..40)) {
            let mut s = random_state(4, seed);
            for g in &gates {
                s.apply(g).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                prop_assert!(s.amplitudes().iter().all(|a| a.re.is_finite() && a.im.is_finite()));
            }
        }

        #[test]
        fn self_inverse_gates(seed in any::<u64>(), g in gate_strategy(3)) {
            let original = random_state(3, seed);
            let mut s = original.clone();
            let inverse = match g {
                Gate::P(q, p) => Gate::P(q, -p),
                Gate::CP(a, b, p) => Gate::CP(a, b, -p),
                other => other,
            };
            s.apply(&g).unwrap();
            s.apply(&inverse).unwrap();
            for (x, y) in s.amplitudes().iter().zip(original.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn phase_gates_commute(seed in any::<u64>(), q in 0usize..3, a in -PI..PI, b in -PI..PI) {
            let mut s1 = random_state(3, seed);
            let mut s2 = s1.clone();
            s1.apply(&Gate::P(q, a)).unwrap();
            s1.apply(&Gate::P(q, b)).unwrap();
            s2.apply(&Gate::P(q, b)).unwrap();
            s2.apply(&Gate::P(q, a)).unwrap();
            for (x, y) in s1.amplitudes().iter().zip(s2.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn outcome_probabilities_sum_to_one(seed in any::<u64>(), gates in proptest::collection::vec(gate_strategy(3), 0..20)) {
            let mut s = random_state(3, seed);
            s.apply_all(&gates).unwrap();
            for q in 0..3 {
                let (p0, p1) = s.outcome_probabilities(q).unwrap();
                prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
            }
        }
    }
}
