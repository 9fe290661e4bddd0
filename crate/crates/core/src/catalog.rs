//! State families with known closed-form values of the measure.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{suggest_cutoff, DensityMatrix, Ket, ModeCutoffs, C64};
use crate::lowrank::{ProductKet, ProductRankState};
use crate::measure::{MeasureResult, Route};

fn check_cutoff(given: usize, mean_n: f64) -> Result<()> {
    let required = suggest_cutoff(mean_n);
    if given < required {
        return Err(Error::InsufficientCutoff { given, required });
    }
    Ok(())
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            reason: "must be finite and > 0",
        });
    }
    Ok(())
}

/// Truncated coherent amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)`, unnormalized.
fn coherent_amplitudes(alpha: C64, cutoff: usize) -> DVector<C64> {
    let mut v = DVector::zeros(cutoff);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff {
        v[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

pub fn make_fock(n: usize, cutoff: usize) -> Result<Ket> {
    if cutoff <= n {
        return Err(Error::InsufficientCutoff {
            given: cutoff,
            required: n + 1,
        });
    }
    Ket::basis(ModeCutoffs::single(cutoff)?, &[n])
}

pub fn make_coherent(alpha: C64, cutoff: usize) -> Result<Ket> {
    check_cutoff(cutoff, alpha.norm_sqr())?;
    Ket::normalized(ModeCutoffs::single(cutoff)?, coherent_amplitudes(alpha, cutoff))
}

/// `(|a> + |-a>) / sqrt(2 + 2 e^{-2a^2})`.
pub fn make_scs(alpha: f64, cutoff: usize) -> Result<Ket> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be finite",
        });
    }
    check_cutoff(cutoff, alpha * alpha)?;
    let mut v = coherent_amplitudes(C64::new(alpha, 0.0), cutoff);
    for n in (1..cutoff).step_by(2) {
        v[n] = C64::new(0.0, 0.0);
    }
    Ket::normalized(ModeCutoffs::single(cutoff)?, v)
}

/// Cat density matrix `N{|b><b| + |-b><-b| + g(|b><-b| + |-b><b|)}` with real `b`.
fn cat_density(beta: f64, gamma: f64, cutoff: usize) -> Result<DensityMatrix> {
    let plus = coherent_amplitudes(C64::new(beta, 0.0), cutoff);
    let minus = coherent_amplitudes(C64::new(-beta, 0.0), cutoff);
    let g = C64::new(gamma, 0.0);
    let data =
        &plus * plus.adjoint() + &minus * minus.adjoint() + (&plus * minus.adjoint() + &minus * plus.adjoint()) * g;
    DensityMatrix::normalize_from(ModeCutoffs::single(cutoff)?, data)
}

pub fn make_decohered_scs(p: &DecoheredScsParams, cutoff: usize) -> Result<DensityMatrix> {
    let t = p.t();
    check_cutoff(cutoff, t * t * p.alpha * p.alpha)?;
    cat_density(t * p.alpha, p.gamma(), cutoff)
}

/// `rho ~ |a><a| + |-a><-a|`.
pub fn make_mixture_scs(alpha: f64, cutoff: usize) -> Result<DensityMatrix> {
    positive("alpha", alpha)?;
    check_cutoff(cutoff, alpha * alpha)?;
    cat_density(alpha, 0.0, cutoff)
}

pub fn make_maximally_mixed(d: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::maximally_mixed(ModeCutoffs::single(d)?))
}

/// Squeezed vacuum with `chi = exp(-e^{-2s} xi_r^2 / 2 - e^{2s} xi_i^2 / 2)`,
/// truncated at `cutoff` and renormalized. No cutoff check: the caller
/// decides what truncation loss is acceptable.
pub fn make_squeezed_vacuum(s: f64, cutoff: usize) -> Result<Ket> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: "must be finite",
        });
    }
    let th = s.tanh();
    let mut v = DVector::zeros(cutoff);
    let mut c = 1.0 / s.cosh().sqrt();
    let mut k = 0usize;
    while 2 * k < cutoff {
        v[2 * k] = C64::new(c, 0.0);
        c *= th * (((2 * k + 1) * (2 * k + 2)) as f64).sqrt() / (2 * (k + 1)) as f64;
        k += 1;
    }
    Ket::normalized(ModeCutoffs::single(cutoff)?, v)
}

/// Geometric populations `nbar^n / (nbar + 1)^{n+1}`, truncated and renormalized.
pub fn make_thermal(nbar: f64, cutoff: usize) -> Result<DensityMatrix> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidParameter {
            name: "nbar",
            reason: "must be finite and >= 0",
        });
    }
    let q = nbar / (nbar + 1.0);
    let mut pops = Vec::with_capacity(cutoff);
    let mut w = 1.0;
    for _ in 0..cutoff {
        pops.push(w);
        w *= q;
    }
    let total: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|p| *p /= total);
    DensityMatrix::diagonal(ModeCutoffs::single(cutoff)?, &pops)
}

fn qubit(c0: f64, c1: f64) -> DVector<C64> {
    DVector::from_vec(vec![C64::new(c0, 0.0), C64::new(c1, 0.0)])
}

fn equal_weights() -> [C64; 2] {
    [C64::new(1.0, 0.0); 2]
}

/// `(|0>^N + |1>^N) / sqrt 2`.
pub fn make_ghz(n_modes: usize) -> Result<ProductRankState> {
    let zeros = ProductKet::uniform(qubit(1.0, 0.0), n_modes)?;
    let ones = ProductKet::uniform(qubit(0.0, 1.0), n_modes)?;
    ProductRankState::superposition(vec![zeros, ones], &equal_weights())
}

/// `(|n,0> + |0,n>) / sqrt 2`.
pub fn make_noon(n: usize) -> Result<ProductRankState> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "must be >= 1",
        });
    }
    let level = |k: usize| {
        let mut v = DVector::zeros(n + 1);
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let a = ProductKet::new(vec![level(n), level(0)])?;
    let b = ProductKet::new(vec![level(0), level(n)])?;
    ProductRankState::superposition(vec![a, b], &equal_weights())
}

/// `K(|0>^N + (cos e |0> + sin e |1>)^N)` with `K` from the Gram matrix.
pub fn make_dur_state(n_modes: usize, epsilon: f64) -> Result<ProductRankState> {
    if !(epsilon > 0.0 && epsilon <= core::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "must lie in (0, pi/2]",
        });
    }
    let a = ProductKet::uniform(qubit(1.0, 0.0), n_modes)?;
    let b = ProductKet::uniform(qubit(epsilon.cos(), epsilon.sin()), n_modes)?;
    ProductRankState::superposition(vec![a, b], &equal_weights())
}

/// Single-mode Gaussian with `chi(xi) = exp(-A xi_r^2 / 2 - B xi_i^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianChar {
    pub a: f64,
    pub b: f64,
}

impl GaussianChar {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        positive("A", a)?;
        positive("B", b)?;
        if a * b < 1.0 - 1e-12 {
            return Err(Error::InvalidParameter {
                name: "A*B",
                reason: "uncertainty relation requires A*B >= 1",
            });
        }
        Ok(Self { a, b })
    }

    pub fn pure_squeezed(s: f64) -> Self {
        Self {
            a: (-2.0 * s).exp(),
            b: (2.0 * s).exp(),
        }
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        Self::new(2.0 * nbar + 1.0, 2.0 * nbar + 1.0)
    }

    /// `(A + B - 2AB) / (4 (AB)^{3/2})`.
    pub fn measure(&self) -> f64 {
        let ab = self.a * self.b;
        (self.a + self.b - 2.0 * ab) / (4.0 * ab.powf(1.5))
    }

    pub fn mean_number(&self) -> f64 {
        (self.a + self.b) / 4.0 - 0.5
    }

    pub fn purity(&self) -> f64 {
        1.0 / (self.a * self.b).sqrt()
    }

    pub fn char_at(&self, xi: C64) -> f64 {
        (-0.5 * (self.a * xi.re * xi.re + self.b * xi.im * xi.im)).exp()
    }

    /// Loss after dimensionless time `tau`: `A -> r^2 + t^2 A` with
    /// `r^2 = 1 - e^{-tau}`, `t^2 = e^{-tau}`, and likewise for `B`.
    pub fn decohere(&self, tau: f64) -> Self {
        let t2 = (-tau).exp();
        let r2 = -(-tau).exp_m1();
        Self {
            a: r2 + t2 * self.a,
            b: r2 + t2 * self.b,
        }
    }

    pub fn to_result(&self) -> MeasureResult {
        closed_result(self.measure(), self.mean_number(), self.purity())
    }
}

pub fn gaussian_measure(g: &GaussianChar) -> f64 {
    g.measure()
}

pub fn gaussian_decohere(g: &GaussianChar, tau: f64) -> GaussianChar {
    g.decohere(tau)
}

fn closed_result(value: f64, mean_n: f64, purity: f64) -> MeasureResult {
    MeasureResult {
        value,
        route: Route::ClosedForm,
        mean_n,
        purity,
        err_estimate: 0.0,
        warnings: Vec::new(),
    }
}

/// Cat state `a` after loss with surviving fraction `decay = e^{-tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoheredScsParams {
    pub alpha: f64,
    pub decay: f64,
}

impl DecoheredScsParams {
    pub fn from_tau(alpha: f64, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: "must be >= 0",
            });
        }
        Self::from_decay(alpha, (-tau).exp())
    }

    /// `decay = e^{-tau} = 1 - r^2` in terms of the normalized time `r`.
    pub fn from_decay(alpha: f64, decay: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        if !(0.0..=1.0).contains(&decay) {
            return Err(Error::InvalidParameter {
                name: "decay",
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self { alpha, decay })
    }

    pub fn tau(&self) -> f64 {
        -self.decay.ln()
    }

    /// Amplitude shrink factor `e^{-tau/2}`.
    pub fn t(&self) -> f64 {
        self.decay.sqrt()
    }

    /// Coherence factor `exp(-2 (1 - e^{-tau}) a^2)`.
    pub fn gamma(&self) -> f64 {
        (-2.0 * (1.0 - self.decay) * self.alpha * self.alpha).exp()
    }

    pub fn initial_mean_number(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        a2 * a2.tanh()
    }

    pub fn mean_number(&self) -> f64 {
        self.decay * self.initial_mean_number()
    }

    /// `<n(0)> e^{-tau} sinh(2 (2e^{-tau} - 1) a^2) / sinh(2 a^2)`.
    pub fn measure(&self) -> f64 {
        let a = 2.0 * self.alpha * self.alpha;
        let y = 2.0 * self.decay - 1.0;
        if y == 0.0 {
            return 0.0;
        }
        // sinh(a y) / sinh(a) without overflow for large a
        let ratio = y.signum() * (a * (y.abs() - 1.0)).exp() * (-2.0 * a * y.abs()).exp_m1() / (-2.0 * a).exp_m1();
        self.mean_number() * ratio
    }

    pub fn purity(&self) -> f64 {
        let g = self.gamma();
        let o = (-2.0 * self.decay * self.alpha * self.alpha).exp();
        let tr = 2.0 + 2.0 * g * o;
        2.0 * ((1.0 + g * o).powi(2) + (o + g).powi(2)) / (tr * tr)
    }

    pub fn to_result(&self) -> MeasureResult {
        closed_result(self.measure(), self.mean_number(), self.purity())
    }
}

pub fn closed_form_decohered_scs(p: &DecoheredScsParams) -> f64 {
    p.measure()
}

/// Cat built from thermal components of variance `v` displaced to `+-d`:
/// `rho ~ \int d^2a P(a) (|a> + |-a>)(<a| + <-a|)` with
/// `P(a) ~ exp(-|a - d|^2 / nbar)`, `nbar = (V - 1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalScsParams {
    pub v: f64,
    pub d: f64,
}

impl ThermalScsParams {
    pub fn new(v: f64, d: f64) -> Result<Self> {
        if !(v >= 1.0) || !v.is_finite() {
            return Err(Error::InvalidParameter {
                name: "V",
                reason: "must be finite and >= 1",
            });
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self { v, d })
    }

    fn s(&self) -> f64 {
        4.0 * self.d * self.d / self.v
    }

    fn u(&self) -> f64 {
        self.v * self.v + 1.0
    }

    /// Normalization `1 / (2 + (2/V) e^{-S/2})`.
    fn m(&self) -> f64 {
        1.0 / (2.0 + 2.0 / self.v * (-0.5 * self.s()).exp())
    }

    pub fn char_at(&self, xi: C64) -> f64 {
        let (v, d) = (self.v, self.d);
        let r2 = xi.norm_sqr();
        let diag = 2.0 * (2.0 * d * xi.im).cos() * (-0.5 * v * r2).exp();
        // cosh(2 d xr / V) e^{-|xi|^2/(2V) - S/2}, combined in one exponent
        let arg = 2.0 * d * xi.re.abs() / v;
        let cross = (1.0 + (-2.0 * arg).exp()) * (arg - r2 / (2.0 * v) - 0.5 * self.s()).exp() / v;
        self.m() * (diag + cross)
    }

    /// Closed-form measure with `R = V - 1`, `Q = (R/V)^2`, `S = 4d^2/V`, `U = V^2 + 1`.
    pub fn measure(&self) -> f64 {
        let (v, d) = (self.v, self.d);
        let r = v - 1.0;
        let q = (r / v).powi(2);
        let s = self.s();
        let u = self.u();
        let m = self.m();
        let tail = 8.0 * (-v * v * s / u).exp() * r * (r * u + 4.0 * d * d * (v + 1.0)) / u.powi(3);
        m * m * ((-s).exp() * (q - s / (v * v)) + q + s - tail)
    }

    pub fn mean_number(&self) -> f64 {
        let (v, d) = (self.v, self.d);
        let e = (-0.5 * self.s()).exp();
        self.m() * (v + 2.0 * d * d - 2.0 / v * e * (d * d / (v * v) - 0.5 / v)) - 0.5
    }

    pub fn purity(&self) -> f64 {
        let (v, d) = (self.v, self.d);
        let s = self.s();
        let u = self.u();
        let m = self.m();
        let cross = 16.0 / u * (-0.5 * s - 2.0 * d * d * (v * v - 1.0) / (v * u)).exp();
        m * m * (4.0 / v * (1.0 + (-s).exp()) + cross)
    }

    pub fn to_result(&self) -> MeasureResult {
        closed_result(self.measure(), self.mean_number(), self.purity())
    }
}

pub fn thermal_scs_measure(p: &ThermalScsParams) -> f64 {
    p.measure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mean_number;
    use crate::lowrank::{gram, measure_lowrank, to_dense};
    use crate::measure::measure_operator;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn scs_mean_number() {
        let rho = make_scs(2.0, 40).unwrap().to_density();
        assert_abs_diff_eq!(mean_number(&rho), 3.9973171, epsilon = 1e-7);
        assert!(matches!(
            make_scs(2.0, 20),
            Err(Error::InsufficientCutoff { required: 26, .. })
        ));
    }

    #[test]
    fn scs_small_alpha_is_vacuum() {
        let k = make_scs(1e-9, 11).unwrap();
        assert_abs_diff_eq!(k.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(measure_operator(&k.to_density()).value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn decohered_limits() {
        let p0 = DecoheredScsParams::from_tau(2.0, 0.0).unwrap();
        assert_eq!(p0.gamma(), 1.0);
        assert_abs_diff_eq!(p0.measure(), 4.0 * 4.0f64.tanh(), epsilon = 1e-14);
        let half = DecoheredScsParams::from_tau(2.0, core::f64::consts::LN_2).unwrap();
        assert_abs_diff_eq!(half.measure(), 0.0, epsilon = 1e-15);
        let gone = DecoheredScsParams::from_decay(2.0, 0.0).unwrap();
        assert_abs_diff_eq!(gone.measure(), 0.0);
        let huge = DecoheredScsParams::from_decay(27.3, 0.3).unwrap();
        assert!(huge.measure().is_finite());
    }

    #[test]
    fn decohered_state_matches_closed_form() {
        let p = DecoheredScsParams::from_tau(1.5, 0.3).unwrap();
        let rho = make_decohered_scs(&p, 40).unwrap();
        let r = measure_operator(&rho);
        assert_abs_diff_eq!(r.value, p.measure(), epsilon = 1e-10);
        assert_abs_diff_eq!(r.mean_n, p.mean_number(), epsilon = 1e-10);
        assert_abs_diff_eq!(r.purity, p.purity(), epsilon = 1e-10);
    }

    #[test]
    fn gaussian_values() {
        assert_abs_diff_eq!(GaussianChar::new(1.0, 1.0).unwrap().measure(), 0.0);
        let sq = GaussianChar::pure_squeezed(1.5);
        assert_relative_eq!(sq.measure(), 1.5f64.sinh().powi(2), max_relative = 1e-12);
        // the quoted five-decimal value 4.53390 is itself rounded off by 7e-5
        assert_abs_diff_eq!(sq.measure(), 4.53383, epsilon = 1e-5);
        assert_relative_eq!(sq.mean_number(), sq.measure(), max_relative = 1e-12);
        assert_abs_diff_eq!(
            GaussianChar::thermal(1.0).unwrap().measure(),
            -1.0 / 9.0,
            epsilon = 1e-15
        );
        assert!(GaussianChar::new(0.5, 0.5).is_err());
        assert_eq!(sq.decohere(0.0), sq);
        let late = sq.decohere(60.0);
        assert_abs_diff_eq!(late.a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(late.measure(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezed_fock_state_moments() {
        let rho = make_squeezed_vacuum(1.0, 60).unwrap().to_density();
        let r = measure_operator(&rho);
        assert_abs_diff_eq!(r.mean_n, 1.0f64.sinh().powi(2), epsilon = 1e-6);
        assert_abs_diff_eq!(r.value, GaussianChar::pure_squeezed(1.0).measure(), epsilon = 1e-5);
    }

    #[test]
    fn thermal_state() {
        let rho = make_thermal(1.0, 60).unwrap();
        assert_abs_diff_eq!(measure_operator(&rho).value, -1.0 / 9.0, epsilon = 1e-6);
    }

    #[test]
    fn thermal_scs_limits() {
        let vac = ThermalScsParams::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(vac.measure(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vac.purity(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vac.mean_number(), 0.0, epsilon = 1e-15);
        let cat = ThermalScsParams::new(1.0, 1.3).unwrap();
        let a2: f64 = 1.69;
        assert_abs_diff_eq!(cat.measure(), a2 * a2.tanh(), epsilon = 1e-13);
        assert_abs_diff_eq!(cat.mean_number(), a2 * a2.tanh(), epsilon = 1e-13);
        assert_abs_diff_eq!(ThermalScsParams::new(1e4, 0.0).unwrap().measure(), 0.5, epsilon = 1e-2);
        assert_abs_diff_eq!(
            ThermalScsParams::new(2.0, 1.0).unwrap().measure(),
            0.356083,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(cat.char_at(C64::new(0.0, 0.0)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_and_noon_are_maximal() {
        let g = measure_lowrank(&make_ghz(8).unwrap());
        assert_abs_diff_eq!(g.value, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.mean_n, 4.0, epsilon = 1e-12);
        let n = measure_lowrank(&make_noon(5).unwrap());
        assert_abs_diff_eq!(n.value, 5.0, epsilon = 1e-12);
        let dense = to_dense(&make_ghz(3).unwrap(), 8).unwrap();
        let nonzero = dense.data().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
        assert!(dense
            .data()
            .iter()
            .all(|z| z.norm() == 0.0 || (z.re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn dur_gram_and_limits() {
        let eps = 0.3f64;
        let s = make_dur_state(7, eps).unwrap();
        assert_abs_diff_eq!(gram(&s)[(0, 1)].re, eps.cos().powi(7), epsilon = 1e-15);
        let ghz_like = measure_lowrank(&make_dur_state(6, core::f64::consts::FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(ghz_like.value, 3.0, epsilon = 1e-12);
    }
}
