//! The exact diagonal steady state `ρ_s ∝ exp(-ξ1 S11) exp(-ξ3 S33)` as a
//! weight vector over the symmetric basis.
//!
//! Up to the constant `η2^{-N}` the weight of `|N, n, m⟩` is `η1^n η2^m`.
//! All weights are bounded by 1 for `η ≤ 1`, so the finite sums stay
//! well-conditioned for any `N` and for both limits `η → 0` and `η → 1`.

use crate::basis::{enumerate_basis, BasisIndex, BasisMap, TransitionLabel};
use crate::error::{Error, Result};
use crate::reservoir::{derive, EnsembleConfig, PumpParameter};

/// Normalized steady-state populations of the symmetric states.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyWeights {
    basis: BasisMap,
    weights: Vec<f64>,
    log_norm: f64,
    eta1: PumpParameter,
    eta2: PumpParameter,
}

/// Compensated (Neumaier) summation.
pub(crate) fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn power(base: f64, exp: usize) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(i32::try_from(exp).unwrap_or(i32::MAX))
    }
}

impl SteadyWeights {
    pub fn from_pumps(n_atoms: usize, eta1: PumpParameter, eta2: PumpParameter) -> Result<Self> {
        let basis = enumerate_basis(n_atoms)?;
        let (e1, e2) = (eta1.eta(), eta2.eta());
        let raw: Vec<f64> = basis
            .states()
            .iter()
            .map(|s| power(e1, s.n()) * power(e2, s.m()))
            .collect();
        let max = raw.iter().copied().fold(0.0, f64::max);
        let total = stable_sum(raw.iter().map(|w| w / max));
        let weights = raw.iter().map(|w| w / max / total).collect();
        Ok(Self {
            basis,
            weights,
            log_norm: max.ln() + total.ln(),
            eta1,
            eta2,
        })
    }

    pub fn basis(&self) -> &BasisMap {
        &self.basis
    }

    pub fn n_atoms(&self) -> usize {
        self.basis.n_atoms()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, s: BasisIndex) -> Option<f64> {
        self.basis.index_of(s).map(|k| self.weights[k])
    }

    pub fn eta1(&self) -> PumpParameter {
        self.eta1
    }

    pub fn eta2(&self) -> PumpParameter {
        self.eta2
    }

    /// Log of `Σ η1^n η2^m`, the normalization actually used.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `ln Z` in the `exp(-ξ1 n - ξ3 (N - m))` convention, `+∞` when `η2 = 0`.
    pub fn log_partition(&self) -> f64 {
        self.log_norm - self.n_atoms() as f64 * self.eta2.eta().ln()
    }

    /// `Σ_k w_k f(k)` for a function diagonal in the basis.
    pub fn expect(&self, f: impl Fn(BasisIndex) -> f64) -> f64 {
        stable_sum(
            self.basis
                .states()
                .iter()
                .zip(&self.weights)
                .filter(|(_, &w)| w != 0.0)
                .map(|(&s, &w)| w * f(s)),
        )
    }

    /// Expectation of an operator product, applied right to left.
    pub fn expect_product(&self, ops: &[TransitionLabel]) -> f64 {
        self.expect(|s| crate::basis::diagonal_element(ops, s))
    }

    /// Copy with weight `k` multiplied by `1 + rel` and renormalized.
    /// Only used to check that the verification suite detects perturbations.
    pub fn perturbed(&self, k: usize, rel: f64) -> Result<Self> {
        if k >= self.weights.len() {
            return Err(Error::Domain(format!("no basis state with index {k}")));
        }
        let mut out = self.clone();
        out.weights[k] *= 1.0 + rel;
        let total = stable_sum(out.weights.iter().copied());
        out.weights.iter_mut().for_each(|w| *w /= total);
        out.log_norm += total.ln();
        Ok(out)
    }
}

/// Steady weights for a configuration with a known exact solution.
///
/// Interfering dipoles reuse the orthogonal weights at `η1 = η2 = η`.
pub fn steady_weights(config: &EnsembleConfig) -> Result<SteadyWeights> {
    let params = derive(config)?;
    SteadyWeights::from_pumps(config.n_atoms, params.eta1, params.eta2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::PumpParameter as P;

    #[test]
    fn vacuum_is_ground_state() {
        let w = SteadyWeights::from_pumps(4, P::VACUUM, P::VACUUM).unwrap();
        assert_eq!(w.weights()[0], 1.0);
        assert!(w.weights()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_atom_at_half() {
        let w = SteadyWeights::from_pumps(1, P::Finite(0.5), P::Finite(0.5)).unwrap();
        let expected = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        for (a, b) in w.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((w.log_norm() - (7.0f64 / 4.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn saturated_is_uniform() {
        let n = 7;
        let w = SteadyWeights::from_pumps(n, P::Saturated, P::Saturated).unwrap();
        let uniform = 2.0 / ((n + 1) * (n + 2)) as f64;
        assert!(w.weights().iter().all(|&x| (x - uniform).abs() < 1e-15));
    }

    #[test]
    fn normalized_and_monotone() {
        let w = SteadyWeights::from_pumps(12, P::Finite(0.7), P::Finite(0.4)).unwrap();
        assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for s in w.basis().states() {
            if s.n() > 0 {
                let lower = BasisIndex::new(s.n() - 1, s.m(), 12).unwrap();
                assert!(w.weight(*s).unwrap() <= w.weight(lower).unwrap());
            }
        }
    }

    #[test]
    fn perturbation_renormalizes() {
        let w = SteadyWeights::from_pumps(3, P::Finite(0.3), P::Finite(0.3)).unwrap();
        let p = w.perturbed(1, 1e-3).unwrap();
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.weights()[1] > w.weights()[1]);
        assert!(w.perturbed(100, 1e-3).is_err());
    }

    #[test]
    fn large_ensemble_does_not_overflow() {
        let w = SteadyWeights::from_pumps(3000, P::Finite(0.5), P::Finite(0.5)).unwrap();
        assert!(w.weights().iter().all(|x| x.is_finite()));
        assert!(w.log_partition().is_finite());
    }
}
