//! Vacuum-environment amplitude damping,
//! `d rho / d tau = sum_m [a_m rho a_m^dag - (rho n_m + n_m rho)/2]`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{jump_sandwich, mean_number, purity, DensityMatrix, ModeCutoffs, C64};
use crate::measure::operator_value;

/// Fixed-step RK4 settings in dimensionless time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSpec {
    pub tau_max: f64,
    pub step: f64,
    pub record_every: usize,
}

impl EvolutionSpec {
    pub const MAX_STEP: f64 = 0.05;
    pub const DEFAULT_STEP: f64 = 0.01;

    pub fn new(tau_max: f64, step: f64, record_every: usize) -> Result<Self> {
        if !(tau_max >= 0.0) || !tau_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau_max",
                reason: "must be finite and >= 0",
            });
        }
        if !(step > 0.0) || step > Self::MAX_STEP {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: "must lie in (0, 0.05]",
            });
        }
        if record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                reason: "must be >= 1",
            });
        }
        Ok(Self {
            tau_max,
            step,
            record_every,
        })
    }

    pub fn with_default_step(tau_max: f64) -> Result<Self> {
        Self::new(tau_max, Self::DEFAULT_STEP, 1)
    }

    fn steps(&self) -> usize {
        (self.tau_max / self.step - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub rho: DensityMatrix,
    pub measure: f64,
    pub purity: f64,
    pub mean_n: f64,
    /// `|Tr rho - 1|` just before renormalization at this record.
    pub trace_drift: f64,
}

pub(crate) fn rhs_raw(cutoffs: &ModeCutoffs, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let d = cutoffs.total();
    let numbers: Vec<f64> = (0..d).map(|i| cutoffs.total_level(i) as f64).collect();
    let mut out = DMatrix::from_fn(d, d, |i, j| rho[(i, j)] * (-0.5 * (numbers[i] + numbers[j])));
    for m in 0..cutoffs.modes() {
        out += jump_sandwich(cutoffs, rho, m);
    }
    out
}

/// `L(rho)`; traceless and Hermitian for a valid state.
pub fn lindblad_rhs(rho: &DensityMatrix) -> DMatrix<C64> {
    rhs_raw(rho.cutoffs(), rho.data())
}

const POSITIVITY_FAIL: f64 = -1e-6;

/// Integrates the damping equation with classical RK4.
///
/// The state is re-Hermitized and renormalized at record points only. The
/// first point is `tau = 0`; the last lands exactly on `tau_max` (the final
/// step is shortened if needed) and is always recorded.
pub fn evolve(rho0: &DensityMatrix, spec: &EvolutionSpec) -> Result<Vec<TrajectoryPoint>> {
    let cutoffs = rho0.cutoffs().clone();
    let mut points = Vec::new();
    points.push(record(rho0.clone(), 0.0, 0.0));
    let steps = spec.steps();
    let mut rho = rho0.data().clone();
    let half = C64::new(0.5, 0.0);
    for k in 1..=steps {
        let tau_prev = (k - 1) as f64 * spec.step;
        let tau = if k == steps { spec.tau_max } else { k as f64 * spec.step };
        let h = tau - tau_prev;
        let hc = C64::new(h, 0.0);
        let k1 = rhs_raw(&cutoffs, &rho);
        let k2 = rhs_raw(&cutoffs, &(&rho + &k1 * (hc * half)));
        let k3 = rhs_raw(&cutoffs, &(&rho + &k2 * (hc * half)));
        let k4 = rhs_raw(&cutoffs, &(&rho + &k3 * hc));
        rho += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (hc / 6.0);
        if k % spec.record_every == 0 || k == steps {
            let herm = (&rho + rho.adjoint()) * half;
            let trace = herm.trace().re;
            let normalized = herm / C64::new(trace, 0.0);
            let state = DensityMatrix::from_parts_unchecked(cutoffs.clone(), normalized);
            if state.dim() <= 512 {
                let min_eigenvalue = state.min_eigenvalue();
                if min_eigenvalue < POSITIVITY_FAIL {
                    return Err(Error::PositivityViolation { tau, min_eigenvalue });
                }
            }
            rho = state.data().clone();
            points.push(record(state, tau, (trace - 1.0).abs()));
        }
    }
    Ok(points)
}

/// Exact single-mode loss channel `exp(tau L)` with `decay = e^{-tau}`:
/// `rho'_{mn} = sum_k sqrt(C(m+k,k) C(n+k,k)) t^{m+n} (1-t^2)^k rho_{m+k,n+k}`, `t^2 = decay`.
pub fn apply_loss(rho: &DensityMatrix, decay: f64) -> Result<DensityMatrix> {
    let cutoffs = rho.cutoffs();
    if cutoffs.modes() != 1 {
        return Err(Error::NotSingleMode { modes: cutoffs.modes() });
    }
    if !(0.0..=1.0).contains(&decay) {
        return Err(Error::InvalidParameter {
            name: "decay",
            reason: "must lie in [0, 1]",
        });
    }
    let d = rho.dim();
    let mut ln_fact = Vec::with_capacity(d);
    ln_fact.push(0.0);
    for i in 1..d {
        ln_fact.push(ln_fact[i - 1] + (i as f64).ln());
    }
    let ln_t2 = decay.ln();
    let ln_r2 = (-decay).ln_1p();
    let pow_ln = |ln_x: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * ln_x };
    // amp[(m, k)] = sqrt(C(m+k, k) t^{2m} r^{2k})
    let amp = DMatrix::from_fn(d, d, |m, k| {
        if m + k >= d {
            return 0.0;
        }
        (0.5 * (ln_fact[m + k] - ln_fact[m] - ln_fact[k] + pow_ln(ln_t2, m) + pow_ln(ln_r2, k))).exp()
    });
    let src = rho.data();
    let out = DMatrix::from_fn(d, d, |m, n| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d - m.max(n) {
            acc += src[(m + k, n + k)] * (amp[(m, k)] * amp[(n, k)]);
        }
        acc
    });
    DensityMatrix::normalize_from(cutoffs.clone(), out)
}

fn record(rho: DensityMatrix, tau: f64, trace_drift: f64) -> TrajectoryPoint {
    TrajectoryPoint {
        tau,
        measure: operator_value(&rho),
        purity: purity(&rho),
        mean_n: mean_number(&rho),
        rho,
        trace_drift,
    }
}
