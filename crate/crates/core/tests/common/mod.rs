#![allow(dead_code)]

use macroq_core::fock::{DensityMatrix, Ket, ModeCutoffs, C64};
use macroq_core::measure::{
    measure_char_quadrature, measure_wigner_grid, GridOptions, MeasureResult, QuadratureOptions,
};
use macroq_core::phase_space::{suggest_half_width, wigner_of, Axis, PhaseSpaceEvaluator};
use nalgebra::{DMatrix, DVector};
use proptest::test_runner::Config;

pub fn proptest_config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

/// `(A A^dag + 1e-6) / Tr` from `2 d^2` raw reals; the offset keeps shrunk
/// all-zero inputs valid.
pub fn density_from_raw(cutoffs: ModeCutoffs, raw: &[f64]) -> DensityMatrix {
    let d = cutoffs.total();
    let a = DMatrix::from_fn(d, d, |i, j| C64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    let floor = DMatrix::identity(d, d) * C64::new(1e-6, 0.0);
    DensityMatrix::normalize_from(cutoffs, &a * a.adjoint() + floor).unwrap()
}

pub fn ket_from_raw(cutoffs: ModeCutoffs, raw: &[f64]) -> Ket {
    let d = cutoffs.total();
    let mut v = DVector::from_fn(d, |i, _| C64::new(raw[2 * i], raw[2 * i + 1]));
    if v.norm() < 1e-9 {
        v[d - 1] = C64::new(1.0, 0.0);
    }
    Ket::normalized(cutoffs, v).unwrap()
}

pub fn quadrature_route(rho: &DensityMatrix, radial_cut: f64) -> MeasureResult {
    let mut ev = PhaseSpaceEvaluator::new(rho).unwrap();
    let opts = QuadratureOptions {
        radial_cut,
        tol: 1e-7,
        max_intervals: 400,
    };
    measure_char_quadrature(|xi| ev.chi(xi[0]), 1, &opts).unwrap()
}

pub fn grid_route(rho: &DensityMatrix) -> MeasureResult {
    let axis = Axis::symmetric(suggest_half_width(rho).unwrap(), 256).unwrap();
    let grid = wigner_of(rho, axis, axis).unwrap();
    measure_wigner_grid(&grid, &GridOptions::default()).unwrap()
}
