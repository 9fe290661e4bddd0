//! Seeded random states for the property suite.
//!
//! Mixed states are `A A^dag / Tr(A A^dag)` with i.i.d. standard complex
//! Gaussian entries of `A`; pure states are normalized complex-Gaussian
//! vectors. Both are reproducible from a `u64` seed.

use macroq_core::fock::{DensityMatrix, Ket, ModeCutoffs, C64};
use macroq_core::Result;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for a labelled sub-suite, so adding a property
    /// does not shift the samples of the others.
    pub fn stream(seed: u64, label: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label);
        Self { rng }
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn mixed(&mut self, cutoffs: &ModeCutoffs) -> Result<DensityMatrix> {
        let d = cutoffs.total();
        let a = DMatrix::from_fn(d, d, |_, _| self.complex_gaussian());
        DensityMatrix::normalize_from(cutoffs.clone(), &a * a.adjoint())
    }

    pub fn pure(&mut self, cutoffs: &ModeCutoffs) -> Result<Ket> {
        let d = cutoffs.total();
        let v = DVector::from_fn(d, |_, _| self.complex_gaussian());
        Ket::normalized(cutoffs.clone(), v)
    }

    /// Random single-mode ket supported on even Fock levels only, so
    /// `<a> = 0` and the measure saturates `<n>`.
    pub fn pure_even(&mut self, cutoff: usize) -> Result<Ket> {
        let v = DVector::from_fn(cutoff, |i, _| {
            if i % 2 == 0 {
                self.complex_gaussian()
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ket::normalized(ModeCutoffs::single(cutoff)?, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use macroq_core::fock::purity;

    #[test]
    fn same_seed_same_states() {
        let cut = ModeCutoffs::single(6).unwrap();
        let a = StateSampler::new(7).mixed(&cut).unwrap();
        let b = StateSampler::new(7).mixed(&cut).unwrap();
        let c = StateSampler::new(8).mixed(&cut).unwrap();
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn streams_differ() {
        let cut = ModeCutoffs::single(4).unwrap();
        let a = StateSampler::stream(1, 0).pure(&cut).unwrap();
        let b = StateSampler::stream(1, 1).pure(&cut).unwrap();
        assert_ne!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn samples_are_valid_states() {
        let mut s = StateSampler::new(3);
        let cut = ModeCutoffs::single(6).unwrap();
        for _ in 0..20 {
            let rho = s.mixed(&cut).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
            assert!(purity(&rho) < 1.0 - 1e-6);
            let ket = s.pure_even(6).unwrap();
            assert!(ket.amplitudes()[1].norm() == 0.0);
        }
    }
}
