//! Evaluation routes for the interference-based measure
//! `I(rho) = (2 pi^M)^-1 \int d^2xi sum_m (|xi_m|^2 - 1) |chi(xi)|^2`
//! `       = -Tr[rho L(rho)]`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{mean_number, purity, DensityMatrix, C64};
use crate::phase_space::{reciprocal_axes, wigner_to_char, WignerGrid};
use crate::quadrature::{integrate_nested, AdaptiveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Operator,
    CharQuadrature,
    WignerGrid,
    ClosedForm,
    LowRank,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Operator => "operator",
            Route::CharQuadrature => "char-quadrature",
            Route::WignerGrid => "wigner-grid",
            Route::ClosedForm => "closed-form",
            Route::LowRank => "low-rank",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Non-fatal conditions attached to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// One of the two highest Fock levels of `mode` holds more than 1e-8 population.
    Truncation { mode: usize, top_population: f64 },
    /// Grid integral was off and the grid was renormalized.
    Normalization { integral: f64 },
    /// Grid edges carry more than the allowed fraction of the peak.
    BoundaryLeak { ratio: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Truncation { mode, top_population } => write!(
                f,
                "mode {mode}: population {top_population:e} in the top Fock levels exceeds 1e-8"
            ),
            Warning::Normalization { integral } => {
                write!(f, "grid integral {integral} deviates from 1; renormalized")
            }
            Warning::BoundaryLeak { ratio } => {
                write!(f, "grid edge/peak ratio {ratio:e} exceeds tolerance")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub route: Route,
    pub mean_n: f64,
    pub purity: f64,
    pub err_estimate: f64,
    pub warnings: Vec<Warning>,
}

impl MeasureResult {
    pub fn warning_messages(&self) -> Vec<String> {
        use alloc::string::ToString;
        self.warnings.iter().map(|w| w.to_string()).collect()
    }
}

pub const TRUNCATION_WARN_LEVEL: f64 = 1e-8;

/// The two sums making up the operator route, totalled over modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorTerms {
    /// `sum_m Tr(rho^2 n_m)`
    pub number: f64,
    /// `sum_m Tr(rho a_m rho a_m^dag)`
    pub jump: f64,
}

/// `sum_m [Tr(rho^2 n_m) - Tr(rho a_m rho a_m^dag)]`, the expansion of
/// `-Tr[rho L(rho)]` for the vacuum-environment Lindbladian.
pub fn operator_value(rho: &DensityMatrix) -> f64 {
    let t = operator_terms(rho);
    t.number - t.jump
}

pub fn operator_terms(rho: &DensityMatrix) -> OperatorTerms {
    let cut = rho.cutoffs();
    let data = rho.data();
    let d = rho.dim();
    let mut row_weight = vec![0.0; d];
    for j in 0..d {
        for (w, z) in row_weight.iter_mut().zip(data.column(j).iter()) {
            *w += z.norm_sqr();
        }
    }
    let mut total = OperatorTerms { number: 0.0, jump: 0.0 };
    let mut factor = vec![0.0; d];
    for m in 0..cut.modes() {
        let stride = cut.stride(m);
        let top = cut.dim(m) - 1;
        let mut number_term = 0.0;
        for (i, f) in factor.iter_mut().enumerate() {
            let n = cut.level(i, m);
            number_term += n as f64 * row_weight[i];
            *f = if n == top { 0.0 } else { ((n + 1) as f64).sqrt() };
        }
        // Tr(rho a rho a^dag) = sum_ij conj(rho[i,j]) rho[i+s, j+s] f_i f_j
        let mut jump_term = 0.0;
        for j in 0..d {
            if factor[j] == 0.0 {
                continue;
            }
            let col = data.column(j);
            let shifted = data.column(j + stride);
            let mut acc = 0.0;
            for i in 0..d - stride {
                if factor[i] != 0.0 {
                    acc += (col[i].conj() * shifted[i + stride]).re * factor[i];
                }
            }
            jump_term += acc * factor[j];
        }
        total.number += number_term;
        total.jump += jump_term;
    }
    total
}

/// Operator route on a dense state.
pub fn measure_operator(rho: &DensityMatrix) -> MeasureResult {
    let value = operator_value(rho);
    let mut warnings = Vec::new();
    let mut err = 0.0;
    for m in 0..rho.cutoffs().modes() {
        let top = rho.top_level_population(m);
        err += top * rho.cutoffs().dim(m) as f64;
        if top > TRUNCATION_WARN_LEVEL {
            warnings.push(Warning::Truncation {
                mode: m,
                top_population: top,
            });
        }
    }
    MeasureResult {
        value,
        route: Route::Operator,
        mean_n: mean_number(rho),
        purity: purity(rho),
        err_estimate: err,
        warnings,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Radial cut per mode; the tail beyond it is bounded assuming a
    /// Gaussian envelope `|chi|^2 <= exp(-|xi|^2)`.
    pub radial_cut: f64,
    pub tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            radial_cut: 8.0,
            tol: 1e-8,
            max_intervals: 200,
        }
    }
}

/// Characteristic-function route: adaptive Gauss–Kronrod in polar
/// coordinates per mode, `xi_m = r_m exp(i phi_m)`.
///
/// `chi` receives one complex argument per mode.
pub fn measure_char_quadrature<F>(mut chi: F, modes: usize, opts: &QuadratureOptions) -> Result<MeasureResult>
where
    F: FnMut(&[C64]) -> C64,
{
    if modes == 0 {
        return Err(Error::InvalidParameter {
            name: "modes",
            reason: "must be >= 1",
        });
    }
    let cut = opts.radial_cut;
    let mut bounds = Vec::with_capacity(2 * modes);
    for _ in 0..modes {
        bounds.push((0.0, cut));
        bounds.push((0.0, 2.0 * PI));
    }
    let mut xi = vec![C64::new(0.0, 0.0); modes];
    let mut integrand = |c: &[f64]| -> [f64; 2] {
        let mut weight = 0.0;
        for m in 0..modes {
            let (r, phi) = (c[2 * m], c[2 * m + 1]);
            xi[m] = C64::from_polar(r, phi);
            weight += r * r - 1.0;
        }
        let mod2 = chi(&xi).norm_sqr();
        [weight * mod2, mod2]
    };
    let jacobian = |level: usize, x: f64| if level.is_multiple_of(2) { x } else { 1.0 };
    let pi_m = PI.powi(modes as i32);
    let scale = 2.0 * pi_m;
    let est = integrate_nested(
        &mut integrand,
        &jacobian,
        &bounds,
        &AdaptiveOptions {
            abs_tol: opts.tol * scale,
            rel_tol: 0.0,
            max_intervals: opts.max_intervals,
        },
    );
    let value = est.value[0] / scale;
    let tail = modes as f64 * 0.5 * (cut * cut + 2.0) * (-cut * cut).exp();
    let err_estimate = est.error / scale + tail;
    if !est.converged {
        return Err(Error::QuadratureNotConverged {
            estimate: value,
            error: err_estimate,
        });
    }
    Ok(MeasureResult {
        value,
        route: Route::CharQuadrature,
        mean_n: mean_number_from_chi(&mut chi, modes),
        purity: est.value[1] / pi_m,
        err_estimate,
        warnings: Vec::new(),
    })
}

/// `<n> = sum_m [-(d^2/dxr^2 + d^2/dxi^2) chi(0) / 4 - 1/2]`, by a 5-point stencil.
fn mean_number_from_chi<F: FnMut(&[C64]) -> C64>(chi: &mut F, modes: usize) -> f64 {
    let h = 1e-2;
    let mut point = vec![C64::new(0.0, 0.0); modes];
    let mut eval = |m: usize, z: C64| {
        point.iter_mut().for_each(|p| *p = C64::new(0.0, 0.0));
        point[m] = z;
        chi(&point).re
    };
    let mut total = 0.0;
    for m in 0..modes {
        let f0 = eval(m, C64::new(0.0, 0.0));
        let mut lap = 0.0;
        for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let f1p = eval(m, dir * h);
            let f1m = eval(m, -dir * h);
            let f2p = eval(m, dir * 2.0 * h);
            let f2m = eval(m, -dir * 2.0 * h);
            lap += (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h);
        }
        total += -lap / 4.0 - 0.5;
    }
    total
}

#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    /// Allowed `|\int W - 1|`.
    pub norm_tol: f64,
    /// Allowed edge/peak ratio of `|W|`.
    pub boundary_tol: f64,
    /// When false, normalization and boundary problems become warnings and
    /// the grid is renormalized.
    pub strict: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            norm_tol: 0.02,
            boundary_tol: 1e-8,
            strict: true,
        }
    }
}

struct GridValue {
    value: f64,
    purity: f64,
}

/// Spectral route on a single-mode Wigner grid: the grid is transformed to
/// `chi` on the reciprocal grid by a separable discrete Fourier transform,
/// then the characteristic-function weights `(|xi|^2 - 1)/(2 pi)` are summed.
///
/// `err_estimate` is the change against a half-resolution re-evaluation.
pub fn measure_wigner_grid(grid: &WignerGrid, opts: &GridOptions) -> Result<MeasureResult> {
    let mut warnings = Vec::new();
    let integral = grid.integral();
    let peak = grid.peak();
    let ratio = if peak > 0.0 {
        grid.boundary_max() / peak
    } else {
        f64::INFINITY
    };
    if ratio > opts.boundary_tol {
        if opts.strict {
            return Err(Error::BoundaryLeak { ratio });
        }
        warnings.push(Warning::BoundaryLeak { ratio });
    }
    if !(integral > 0.0) {
        return Err(Error::Normalization { integral });
    }
    let rescaled;
    let grid = if (integral - 1.0).abs() > opts.norm_tol {
        if opts.strict {
            return Err(Error::Normalization { integral });
        }
        warnings.push(Warning::Normalization { integral });
        rescaled = grid.scaled(1.0 / integral);
        &rescaled
    } else {
        grid
    };
    let full = spectral_value(grid)?;
    let half = spectral_value(&grid.decimated()?)?;
    let area = grid.cell_area();
    let mut second_moment = 0.0;
    for (i, xv) in grid.x.values().enumerate() {
        for (j, pv) in grid.p.values().enumerate() {
            second_moment += (xv * xv + pv * pv) * grid.get(i, j);
        }
    }
    Ok(MeasureResult {
        value: full.value,
        route: Route::WignerGrid,
        mean_n: second_moment * area / grid.integral() - 0.5,
        purity: full.purity,
        err_estimate: (full.value - half.value).abs(),
        warnings,
    })
}

fn spectral_value(grid: &WignerGrid) -> Result<GridValue> {
    let (xr, xi) = reciprocal_axes(grid)?;
    let chi = wigner_to_char(grid, &xr, &xi);
    let cell = xr.step() * xi.step();
    let mut weighted = 0.0;
    let mut plain = 0.0;
    for (k, r) in xr.values().enumerate() {
        for (l, q) in xi.values().enumerate() {
            let m2 = chi.get(k, l).norm_sqr();
            weighted += (r * r + q * q - 1.0) * m2;
            plain += m2;
        }
    }
    Ok(GridValue {
        value: weighted * cell / (2.0 * PI),
        purity: plain * cell / PI,
    })
}
