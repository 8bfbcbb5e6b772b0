//! Fidelity, EPR budgets and per-run measurements.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fabric::PartitionPlan;

/// Probability distribution over integer outcomes. Missing keys are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Distribution {
    probs: BTreeMap<u64, f64>,
}

impl Distribution {
    /// Validates and wraps a map of probabilities.
    pub fn new(probs: BTreeMap<u64, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (&v, &p) in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!("p({v}) = {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Dense vector indexed by outcome; exact zeros are dropped.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        Self::new(
            dense
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(v, &p)| (v as u64, p))
                .collect(),
        )
    }

    /// Empirical distribution of a histogram.
    pub fn from_counts(counts: &BTreeMap<u64, usize>) -> Result<Self> {
        let shots: usize = counts.values().sum();
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Self::new(
            counts
                .iter()
                .map(|(&v, &c)| (v, c as f64 / shots as f64))
                .collect(),
        )
    }

    pub fn get(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&v, &p)| (v, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Most likely outcome; ties go to the smaller value.
    pub fn mode(&self) -> Option<u64> {
        self.probs
            .iter()
            .fold(None, |best: Option<(u64, f64)>, (&v, &p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((v, p)),
            })
            .map(|(v, _)| v)
    }

    /// Largest per-outcome difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|&v| (self.get(v) - other.get(v)).abs())
            .fold(0.0, f64::max)
    }
}

/// Classical (Bhattacharyya) fidelity `Σ √(p_i q_i)`.
pub fn classical_fidelity(p: &Distribution, q: &Distribution) -> f64 {
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let f: f64 = small
        .iter()
        .map(|(v, pv)| (pv * large.get(v)).sqrt())
        .sum();
    f.clamp(0.0, 1.0)
}

/// EPR pairs used when every gate sharing a control qubit and a receiving
/// node is grouped under one cat session: `Σ_{i<k} m_i (k - i)`.
pub fn epr_budget(plan: &PartitionPlan) -> u64 {
    let k = plan.k();
    plan.sizes()
        .iter()
        .enumerate()
        .map(|(i, &m)| (m * (k - 1 - i)) as u64)
        .sum()
}

/// EPR pairs if every controlled phase were teleported on its own:
/// `n (n - 1) / 2`.
pub fn naive_epr_budget(n: usize) -> u64 {
    (n * n.saturating_sub(1) / 2) as u64
}

/// Measurements of one circuit execution.
///
/// Resource counters (EPR pairs, messages, measurements) are per circuit
/// execution, not multiplied by the number of shots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub wall_time_seconds: f64,
    /// Bytes of the largest statevector held during the run.
    pub peak_state_bytes: u64,
    pub epr_count: u64,
    pub classical_msg_count: u64,
    pub midcircuit_measurements: u64,
    pub block_slots: usize,
    pub shots: usize,
    pub fidelity_vs_reference: f64,
}

/// Runs `f` and reports its monotonic wall time in seconds.
pub fn measure_run<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(pairs: &[(u64, f64)]) -> Distribution {
        Distribution::new(pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let p = dist(&[(0, 0.25), (3, 0.75)]);
        assert!((classical_fidelity(&p, &p) - 1.0).abs() < 1e-15);
        assert_eq!(classical_fidelity(&dist(&[(0, 1.0)]), &dist(&[(1, 1.0)])), 0.0);
        let half = dist(&[(0, 0.5), (1, 0.5)]);
        let f = classical_fidelity(&half, &dist(&[(0, 1.0)]));
        assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_distributions() {
        assert!(Distribution::new([(0, 0.5)].into()).is_err());
        assert!(Distribution::new([(0, -0.1), (1, 1.1)].into()).is_err());
        assert!(Distribution::new([(0, f64::NAN)].into()).is_err());
    }

    #[test]
    fn budgets() {
        let plan = PartitionPlan::new(8, 4).unwrap();
        assert_eq!(epr_budget(&plan), 12);
        assert_eq!(naive_epr_budget(8), 28);
        assert_eq!(epr_budget(&PartitionPlan::new(5, 1).unwrap()), 0);
        assert_eq!(epr_budget(&PartitionPlan::new(10, 4).unwrap()), 2 * 3 + 2 * 2 + 2);
    }

    #[test]
    fn mode_prefers_smaller_on_ties() {
        assert_eq!(dist(&[(2, 0.5), (7, 0.5)]).mode(), Some(2));
        assert_eq!(dist(&[(2, 0.25), (7, 0.75)]).mode(), Some(7));
    }

    #[test]
    fn measure_run_times_closure() {
        let (v, t) = measure_run(|| 41 + 1);
        assert_eq!(v, 42);
        assert!(t >= 0.0);
    }

    fn random_dist(weights: Vec<f64>) -> Distribution {
        let total: f64 = weights.iter().sum();
        Distribution::from_dense(&weights.iter().map(|w| w / total).collect::<Vec<_>>()).unwrap()
    }

    proptest! {
        #[test]
        fn fidelity_is_symmetric_and_bounded(
            a in proptest::collection::vec(0.01f64..1.0, 1..16),
            b in proptest::collection::vec(0.01f64..1.0, 1..16),
        ) {
            let (p, q) = (random_dist(a), random_dist(b));
            let f = classical_fidelity(&p, &q);
            prop_assert!((f - classical_fidelity(&q, &p)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn grouped_budget_never_exceeds_naive(n in 1usize..40, k_raw in 1usize..40) {
            let k = 1 + (k_raw - 1) % n;
            let plan = PartitionPlan::new(n, k).unwrap();
            let grouped = epr_budget(&plan);
            let naive = naive_epr_budget(n);
            prop_assert!(grouped <= naive);
            prop_assert_eq!(grouped == naive, k == n);
            if plan.sizes().iter().all(|&m| m == plan.sizes()[0]) {
                let m = (n / k) as u64;
                prop_assert_eq!(grouped, m * (k * (k - 1) / 2) as u64);
            }
        }
    }
}
