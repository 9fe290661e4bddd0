//! Low-rank states over many modes, `rho = sum_ij c_ij |psi_i><psi_j|`, where
//! every `|psi_i>` is a product of small single-mode kets.
//!
//! All traces reduce to products of per-mode overlaps, so the cost is
//! `O(r^3 M)` instead of exponential in the mode count `M`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{hermitian_deviation, DensityMatrix, ModeCutoffs, C64};
use crate::measure::{MeasureResult, Route};

/// Largest per-mode factor dimension.
pub const MAX_FACTOR_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductKet {
    factors: Vec<DVector<C64>>,
}

impl ProductKet {
    pub fn new(factors: Vec<DVector<C64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter {
                name: "factors",
                reason: "at least one mode is required",
            });
        }
        for f in &factors {
            if f.is_empty() || f.len() > MAX_FACTOR_DIM {
                return Err(Error::InvalidParameter {
                    name: "factors",
                    reason: "per-mode dimension must be in 1..=16",
                });
            }
            let deviation = (f.norm() - 1.0).abs();
            if deviation > 1e-12 {
                return Err(Error::NotNormalized { deviation });
            }
        }
        Ok(Self { factors })
    }

    /// The same single-mode ket on every one of `modes` modes.
    pub fn uniform(factor: DVector<C64>, modes: usize) -> Result<Self> {
        Self::new(vec![factor; modes])
    }

    pub fn factors(&self) -> &[DVector<C64>] {
        &self.factors
    }

    pub fn modes(&self) -> usize {
        self.factors.len()
    }

    fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|f| f.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductRankState {
    kets: Vec<ProductKet>,
    coeff: DMatrix<C64>,
}

/// Per-pair, per-mode single-mode matrix elements.
struct ModeElements {
    overlap: Vec<Vec<C64>>,
    number: Vec<Vec<C64>>,
    lower: Vec<Vec<C64>>,
}

impl ProductRankState {
    pub fn new(kets: Vec<ProductKet>, coeff: DMatrix<C64>) -> Result<Self> {
        let state = Self::unvalidated(kets, coeff)?;
        let trace = state.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::BadTrace { trace });
        }
        Ok(state)
    }

    /// Rescales `coeff` so that `Tr(rho) = sum_ij c_ij <psi_j|psi_i> = 1`.
    pub fn normalized(kets: Vec<ProductKet>, coeff: DMatrix<C64>) -> Result<Self> {
        let mut state = Self::unvalidated(kets, coeff)?;
        let trace = state.trace();
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::BadTrace { trace });
        }
        state.coeff /= C64::new(trace, 0.0);
        Ok(state)
    }

    /// Pure superposition `sum_i w_i |psi_i>`, normalized.
    pub fn superposition(kets: Vec<ProductKet>, weights: &[C64]) -> Result<Self> {
        if weights.len() != kets.len() {
            return Err(Error::DimensionMismatch {
                expected: kets.len(),
                got: weights.len(),
            });
        }
        let w = DVector::from_column_slice(weights);
        Self::normalized(kets, &w * w.adjoint())
    }

    fn unvalidated(kets: Vec<ProductKet>, coeff: DMatrix<C64>) -> Result<Self> {
        let r = kets.len();
        if r == 0 {
            return Err(Error::InvalidParameter {
                name: "kets",
                reason: "at least one ket is required",
            });
        }
        if coeff.nrows() != r || coeff.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: coeff.nrows().max(coeff.ncols()),
            });
        }
        let first: Vec<usize> = kets[0].dims().collect();
        if kets.iter().any(|k| !k.dims().eq(first.iter().copied())) {
            return Err(Error::ModeStructureMismatch);
        }
        let scale = coeff.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let deviation = hermitian_deviation(&coeff);
        if deviation > 1e-12 * scale.max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { kets, coeff })
    }

    pub fn kets(&self) -> &[ProductKet] {
        &self.kets
    }

    pub fn coeff(&self) -> &DMatrix<C64> {
        &self.coeff
    }

    pub fn rank(&self) -> usize {
        self.kets.len()
    }

    pub fn modes(&self) -> usize {
        self.kets[0].modes()
    }

    pub fn mode_dims(&self) -> Vec<usize> {
        self.kets[0].dims().collect()
    }

    fn trace(&self) -> f64 {
        (&self.coeff * gram(self)).trace().re
    }

    /// Same kets with the off-diagonal coefficients removed, renormalized.
    pub fn without_coherences(&self) -> Result<Self> {
        let r = self.rank();
        let diag = DMatrix::from_fn(
            r,
            r,
            |i, j| if i == j { self.coeff[(i, i)] } else { C64::new(0.0, 0.0) },
        );
        Self::normalized(self.kets.clone(), diag)
    }

    fn mode_elements(&self, mode: usize) -> ModeElements {
        let r = self.rank();
        let mut overlap = vec![vec![C64::new(0.0, 0.0); r]; r];
        let mut number = overlap.clone();
        let mut lower = overlap.clone();
        for j in 0..r {
            let bra = &self.kets[j].factors[mode];
            for i in 0..r {
                let ket = &self.kets[i].factors[mode];
                let mut o = C64::new(0.0, 0.0);
                let mut n = C64::new(0.0, 0.0);
                let mut a = C64::new(0.0, 0.0);
                for k in 0..ket.len() {
                    let prod = bra[k].conj() * ket[k];
                    o += prod;
                    n += prod * k as f64;
                    if k + 1 < ket.len() {
                        // <bra| a |ket> picks ket[k+1] sqrt(k+1)
                        a += bra[k].conj() * ket[k + 1] * ((k + 1) as f64).sqrt();
                    }
                }
                overlap[j][i] = o;
                number[j][i] = n;
                lower[j][i] = a;
            }
        }
        ModeElements { overlap, number, lower }
    }
}

/// Gram matrix `G[j][i] = <psi_j|psi_i> = prod_m <psi_j^m|psi_i^m>`.
pub fn gram(state: &ProductRankState) -> DMatrix<C64> {
    let r = state.rank();
    DMatrix::from_fn(r, r, |j, i| {
        state.kets[j]
            .factors
            .iter()
            .zip(&state.kets[i].factors)
            .fold(C64::new(1.0, 0.0), |acc, (b, k)| acc * b.dotc(k))
    })
}

/// Exact `I`, `<n>` and purity from overlap products.
///
/// For each mode, the full-space matrices of `n_m` and `a_m` between the
/// kets are the single-mode element times the product of overlaps on all
/// other modes, built from prefix and suffix products so that vanishing
/// overlaps are handled exactly.
pub fn measure_lowrank(state: &ProductRankState) -> MeasureResult {
    let r = state.rank();
    let modes = state.modes();
    let per_mode: Vec<ModeElements> = (0..modes).map(|m| state.mode_elements(m)).collect();

    // prefix[m] = prod_{m' < m} overlap, suffix[m] = prod_{m' > m} overlap.
    let mut prefix = vec![vec![vec![C64::new(1.0, 0.0); r]; r]; modes + 1];
    for m in 0..modes {
        for j in 0..r {
            for i in 0..r {
                prefix[m + 1][j][i] = prefix[m][j][i] * per_mode[m].overlap[j][i];
            }
        }
    }
    let mut suffix = vec![vec![vec![C64::new(1.0, 0.0); r]; r]; modes + 1];
    for m in (0..modes).rev() {
        for j in 0..r {
            for i in 0..r {
                suffix[m][j][i] = suffix[m + 1][j][i] * per_mode[m].overlap[j][i];
            }
        }
    }
    let c = &state.coeff;
    let g = DMatrix::from_fn(r, r, |j, i| prefix[modes][j][i]);
    let cg = c * &g;
    let purity = (&cg * &cg).trace().re;

    let mut value = 0.0;
    let mut mean_n = 0.0;
    for m in 0..modes {
        let rest = |j: usize, i: usize| prefix[m][j][i] * suffix[m + 1][j][i];
        let n_mat = DMatrix::from_fn(r, r, |j, i| per_mode[m].number[j][i] * rest(j, i));
        let a_mat = DMatrix::from_fn(r, r, |j, i| per_mode[m].lower[j][i] * rest(j, i));
        // Tr(rho^2 n) = Tr(c G c N), Tr(rho a rho a^dag) = Tr(c A c A^dag)
        let number_term = (&cg * c * &n_mat).trace().re;
        let ca = c * &a_mat;
        let jump_term = (&ca * c * a_mat.adjoint()).trace().re;
        value += number_term - jump_term;
        mean_n += (c * &n_mat).trace().re;
    }
    MeasureResult {
        value,
        route: Route::LowRank,
        mean_n,
        purity,
        err_estimate: 0.0,
        warnings: Vec::new(),
    }
}

/// Expands to a dense density matrix if `prod_m d_m <= max_dim`.
pub fn to_dense(state: &ProductRankState, max_dim: usize) -> Result<DensityMatrix> {
    let dims = state.mode_dims();
    let mut dim: usize = 1;
    for &d in &dims {
        dim = match dim.checked_mul(d) {
            Some(v) if v <= max_dim => v,
            _ => {
                return Err(Error::DimensionOverflow {
                    dim: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                    limit: max_dim,
                })
            }
        };
    }
    let cutoffs = ModeCutoffs::new(dims)?;
    let dense_kets: Vec<DVector<C64>> = state
        .kets
        .iter()
        .map(|k| {
            k.factors
                .iter()
                .skip(1)
                .fold(k.factors[0].clone(), |acc, f| acc.kronecker(f))
        })
        .collect();
    let mut data = DMatrix::zeros(dim, dim);
    for (i, ki) in dense_kets.iter().enumerate() {
        for (j, kj) in dense_kets.iter().enumerate() {
            let cij = state.coeff[(i, j)];
            if cij == C64::new(0.0, 0.0) {
                continue;
            }
            data.gerc(cij, ki, kj, C64::new(1.0, 0.0));
        }
    }
    DensityMatrix::normalize_from(cutoffs, data)
}
