//! Dense truncated Fock-space states and ladder operators.
//!
//! Basis ordering is row-major over modes: mode 0 is the most significant
//! digit, so for cutoffs `(2, 2)` the basis reads `|00>, |01>, |10>, |11>`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical tolerances used when validating states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity tolerance, `max|rho - rho^dag| <= herm * max|rho|`.
    pub hermitian: f64,
    pub trace: f64,
    /// Eigenvalue floor for the positivity check.
    pub positivity: f64,
    pub ket_norm: f64,
    /// Maximum trace lost to truncation by a displacement.
    pub leak: f64,
    /// Positivity is only checked on construction up to this dimension.
    pub positivity_check_max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            trace: 1e-10,
            positivity: -1e-9,
            ket_norm: 1e-12,
            leak: 1e-6,
            positivity_check_max_dim: 512,
        }
    }
}

/// Per-mode Fock cutoffs. Mode `m` keeps levels `0..dims[m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeCutoffs {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl ModeCutoffs {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidCutoffs("at least one mode is required"));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidCutoffs("every cutoff must be >= 1"));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .ok_or(Error::InvalidCutoffs("total dimension overflows"))?;
        }
        let mut strides = vec![1; dims.len()];
        for m in (0..dims.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * dims[m + 1];
        }
        Ok(Self { dims, strides, total })
    }

    pub fn single(cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff])
    }

    pub fn uniform(modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff; modes])
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Total Hilbert-space dimension.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Occupation of `mode` in basis state `index`.
    #[inline]
    pub fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    /// Total photon number of basis state `index`.
    pub fn total_level(&self, index: usize) -> usize {
        (0..self.modes()).map(|m| self.level(index, m)).sum()
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.modes() {
            return Err(Error::DimensionMismatch {
                expected: self.modes(),
                got: levels.len(),
            });
        }
        let mut index = 0;
        for (m, &n) in levels.iter().enumerate() {
            if n >= self.dims[m] {
                return Err(Error::InvalidParameter {
                    name: "levels",
                    reason: "occupation exceeds cutoff",
                });
            }
            index += n * self.strides[m];
        }
        Ok(index)
    }

    pub fn multi_index(&self, index: usize) -> Vec<usize> {
        (0..self.modes()).map(|m| self.level(index, m)).collect()
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes(),
            })
        } else {
            Ok(())
        }
    }
}

/// Truncation heuristic from the Poisson tail: `ceil(n + 6 sqrt(n) + 10)`.
pub fn suggest_cutoff(mean_n: f64) -> usize {
    let n = mean_n.max(0.0);
    (n + 6.0 * n.sqrt() + 10.0).ceil() as usize
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    cutoffs: ModeCutoffs,
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn new(cutoffs: ModeCutoffs, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != cutoffs.total() {
            return Err(Error::DimensionMismatch {
                expected: cutoffs.total(),
                got: amplitudes.len(),
            });
        }
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > Tolerances::default().ket_norm {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { cutoffs, amplitudes })
    }

    /// Builds a ket from unnormalized amplitudes.
    pub fn normalized(cutoffs: ModeCutoffs, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized {
                deviation: (norm - 1.0).abs(),
            });
        }
        Self::new(cutoffs, amplitudes / C64::new(norm, 0.0))
    }

    pub fn basis(cutoffs: ModeCutoffs, levels: &[usize]) -> Result<Self> {
        let index = cutoffs.index_of(levels)?;
        let mut amps = DVector::zeros(cutoffs.total());
        amps[index] = C64::new(1.0, 0.0);
        Self::new(cutoffs, amps)
    }

    pub fn cutoffs(&self) -> &ModeCutoffs {
        &self.cutoffs
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let data = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix {
            cutoffs: self.cutoffs.clone(),
            data,
        }
    }
}

/// A validated density matrix on a truncated multi-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    cutoffs: ModeCutoffs,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(cutoffs: ModeCutoffs, data: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(cutoffs, data, &Tolerances::default())
    }

    pub fn with_tolerances(cutoffs: ModeCutoffs, data: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let dim = cutoffs.total();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.nrows().max(data.ncols()),
            });
        }
        let scale = data.iter().fold(0.0f64, |acc, z| acc.max(z.norm_sqr())).sqrt();
        let deviation = hermitian_deviation(&data);
        if deviation > tol.hermitian * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = data.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace { trace });
        }
        let state = Self { cutoffs, data };
        if dim <= tol.positivity_check_max_dim {
            let min_eigenvalue = state.min_eigenvalue();
            if min_eigenvalue < tol.positivity {
                return Err(Error::NotPositive { min_eigenvalue });
            }
        }
        Ok(state)
    }

    /// Hermitizes `(m + m^dag)/2` and rescales to unit trace before validating.
    pub fn normalize_from(cutoffs: ModeCutoffs, mut data: DMatrix<C64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::DimensionMismatch {
                expected: cutoffs.total(),
                got: data.nrows().max(data.ncols()),
            });
        }
        for_upper_pairs(data.nrows(), |i, j| {
            let avg = (data[(i, j)] + data[(j, i)].conj()) * 0.5;
            data[(i, j)] = avg;
            data[(j, i)] = avg.conj();
        });
        let trace = data.trace().re;
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::BadTrace { trace });
        }
        data.unscale_mut(trace);
        Self::new(cutoffs, data)
    }

    pub fn from_ket(ket: &Ket) -> Self {
        ket.to_density()
    }

    /// Fock-diagonal state from (unnormalized) populations.
    pub fn diagonal(cutoffs: ModeCutoffs, populations: &[f64]) -> Result<Self> {
        if populations.len() != cutoffs.total() {
            return Err(Error::DimensionMismatch {
                expected: cutoffs.total(),
                got: populations.len(),
            });
        }
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "populations",
                reason: "must be finite and non-negative",
            });
        }
        let total: f64 = populations.iter().sum();
        let d = cutoffs.total();
        let data = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(populations[i] / total, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(cutoffs, data)
    }

    pub fn maximally_mixed(cutoffs: ModeCutoffs) -> Self {
        let d = cutoffs.total();
        let data = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { cutoffs, data }
    }

    pub fn cutoffs(&self) -> &ModeCutoffs {
        &self.cutoffs
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.total()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.data
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &e| acc.min(e))
    }

    /// Larger population of the two highest Fock levels of `mode`. Two
    /// levels, so states supported on one parity are not missed.
    pub fn top_level_population(&self, mode: usize) -> f64 {
        let top = self.cutoffs.dim(mode) - 1;
        let mut pop = [0.0f64; 2];
        for i in 0..self.dim() {
            let level = self.cutoffs.level(i, mode);
            if level + 1 >= top && level <= top {
                pop[top - level] += self.data[(i, i)].re;
            }
        }
        pop[0].max(pop[1])
    }

    pub(crate) fn from_parts_unchecked(cutoffs: ModeCutoffs, data: DMatrix<C64>) -> Self {
        Self { cutoffs, data }
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for_upper_pairs(m.nrows(), |i, j| {
        dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm_sqr());
    });
    dev.sqrt()
}

/// Visits `(i, j)` with `i <= j` in cache-sized tiles.
fn for_upper_pairs(n: usize, mut f: impl FnMut(usize, usize)) {
    const TILE: usize = 64;
    for jb in (0..n).step_by(TILE) {
        for ib in (0..=jb).step_by(TILE) {
            for j in jb..(jb + TILE).min(n) {
                for i in ib..(ib + TILE).min(j + 1) {
                    f(i, j);
                }
            }
        }
    }
}

/// `a_m` on the full truncated space.
pub fn annihilation_op(cutoffs: &ModeCutoffs, mode: usize) -> Result<DMatrix<C64>> {
    cutoffs.check_mode(mode)?;
    let d = cutoffs.total();
    let stride = cutoffs.stride(mode);
    let mut a = DMatrix::zeros(d, d);
    for col in 0..d {
        let n = cutoffs.level(col, mode);
        if n > 0 {
            a[(col - stride, col)] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    Ok(a)
}

pub fn creation_op(cutoffs: &ModeCutoffs, mode: usize) -> Result<DMatrix<C64>> {
    Ok(annihilation_op(cutoffs, mode)?.adjoint())
}

/// Total number operator `sum_m a_m^dag a_m`.
pub fn number_op(cutoffs: &ModeCutoffs) -> DMatrix<C64> {
    let d = cutoffs.total();
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(cutoffs.total_level(i) as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Tr(rho N)`.
pub fn mean_number(rho: &DensityMatrix) -> f64 {
    let c = rho.cutoffs();
    (0..rho.dim())
        .map(|i| c.total_level(i) as f64 * rho.data()[(i, i)].re)
        .sum()
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.data().iter().map(|z| z.norm_sqr()).sum()
}

/// `a_m rho a_m^dag` without forming the ladder matrices.
pub(crate) fn jump_sandwich(cutoffs: &ModeCutoffs, rho: &DMatrix<C64>, mode: usize) -> DMatrix<C64> {
    let d = cutoffs.total();
    let stride = cutoffs.stride(mode);
    let top = cutoffs.dim(mode) - 1;
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        let nj = cutoffs.level(j, mode);
        if nj == top {
            continue;
        }
        let fj = ((nj + 1) as f64).sqrt();
        for i in 0..d {
            let ni = cutoffs.level(i, mode);
            if ni == top {
                continue;
            }
            let fi = ((ni + 1) as f64).sqrt();
            out[(i, j)] = rho[(i + stride, j + stride)] * (fi * fj);
        }
    }
    out
}

/// Truncated single-mode displacement matrix, entry `[m, n] = <m|D(beta)|n>`.
///
/// Uses the associated-Laguerre form of the matrix elements, evaluated by a
/// forward recurrence on scaled quantities that are bounded by one.
pub fn displacement_matrix(cutoff: usize, beta: C64) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(cutoff, cutoff);
    fill_displacement(&mut out, cutoff, beta);
    out
}

pub(crate) fn fill_displacement(out: &mut DMatrix<C64>, cutoff: usize, beta: C64) {
    let x = beta.norm_sqr();
    let r = beta.norm();
    let phase = if r > 0.0 { beta / r } else { C64::new(1.0, 0.0) };
    let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
    let mut ln_fact = 0.0;
    let mut phase_k = C64::new(1.0, 0.0);
    let mut h = vec![0.0f64; cutoff];
    for k in 0..cutoff {
        if k > 0 {
            ln_fact += (k as f64).ln();
            phase_k *= phase;
        }
        let kf = k as f64;
        let ln_h0 = if k == 0 {
            -0.5 * x
        } else {
            kf * ln_r - 0.5 * x - 0.5 * ln_fact
        };
        let len = cutoff - k;
        h[0] = ln_h0.exp();
        if len > 1 {
            h[1] = (1.0 + kf - x) * h[0] / (1.0 + kf).sqrt();
        }
        for j in 1..len.saturating_sub(1) {
            let jf = j as f64;
            h[j + 1] = ((2.0 * jf + 1.0 + kf - x) * h[j] - (jf * (jf + kf)).sqrt() * h[j - 1])
                / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
        }
        let upper = if k % 2 == 0 { phase_k.conj() } else { -phase_k.conj() };
        for j in 0..len {
            out[(j + k, j)] = phase_k * h[j];
            if k > 0 {
                out[(j, j + k)] = upper * h[j];
            }
        }
    }
}

/// Left-multiplies `mat` by `op` acting on `mode` only.
pub(crate) fn apply_mode_left(
    cutoffs: &ModeCutoffs,
    mode: usize,
    op: &DMatrix<C64>,
    mat: &DMatrix<C64>,
) -> DMatrix<C64> {
    let d = cutoffs.total();
    let dm = cutoffs.dim(mode);
    let stride = cutoffs.stride(mode);
    let mut out = DMatrix::zeros(d, mat.ncols());
    for row in 0..d {
        let n = cutoffs.level(row, mode);
        let base = row - n * stride;
        for k in 0..dm {
            let w = op[(n, k)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let src = base + k * stride;
            for col in 0..mat.ncols() {
                out[(row, col)] += w * mat[(src, col)];
            }
        }
    }
    out
}

/// `D(beta) rho D(beta)^dag` with one amplitude per mode.
pub fn apply_displacement(rho: &DensityMatrix, betas: &[C64]) -> Result<DensityMatrix> {
    apply_displacement_with(rho, betas, &Tolerances::default())
}

pub fn apply_displacement_with(rho: &DensityMatrix, betas: &[C64], tol: &Tolerances) -> Result<DensityMatrix> {
    let cutoffs = rho.cutoffs();
    if betas.len() != cutoffs.modes() {
        return Err(Error::DimensionMismatch {
            expected: cutoffs.modes(),
            got: betas.len(),
        });
    }
    let mut data = rho.data().clone();
    for (mode, &beta) in betas.iter().enumerate() {
        if beta == C64::new(0.0, 0.0) {
            continue;
        }
        let op = displacement_matrix(cutoffs.dim(mode), beta);
        let left = apply_mode_left(cutoffs, mode, &op, &data);
        data = apply_mode_left(cutoffs, mode, &op, &left.adjoint()).adjoint();
    }
    let trace = data.trace().re;
    let lost = (1.0 - trace).abs();
    if lost > tol.leak {
        return Err(Error::TruncationLeak {
            lost,
            tolerance: tol.leak,
        });
    }
    DensityMatrix::normalize_from(cutoffs.clone(), data)
}

/// `R(theta) rho R(theta)^dag` with `R = exp(i sum_m theta_m n_m)`.
pub fn apply_rotation(rho: &DensityMatrix, thetas: &[f64]) -> Result<DensityMatrix> {
    let cutoffs = rho.cutoffs();
    if thetas.len() != cutoffs.modes() {
        return Err(Error::DimensionMismatch {
            expected: cutoffs.modes(),
            got: thetas.len(),
        });
    }
    let d = rho.dim();
    let angle = |i: usize| -> f64 {
        thetas
            .iter()
            .enumerate()
            .map(|(m, th)| th * cutoffs.level(i, m) as f64)
            .sum()
    };
    let angles: Vec<f64> = (0..d).map(angle).collect();
    let data = DMatrix::from_fn(d, d, |i, j| {
        rho.data()[(i, j)] * C64::from_polar(1.0, angles[i] - angles[j])
    });
    Ok(DensityMatrix::from_parts_unchecked(cutoffs.clone(), data))
}
