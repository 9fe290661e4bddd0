//! Numeric route selection for dense single-mode states.

use macroq_core::fock::DensityMatrix;
use macroq_core::measure::{
    measure_char_quadrature, measure_operator, measure_wigner_grid, GridOptions, MeasureResult, QuadratureOptions,
};
use macroq_core::phase_space::{quadrature_second_moments, suggest_half_width, wigner_of, Axis, PhaseSpaceEvaluator};
use macroq_core::Result;

pub const GRID_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NumericRoute {
    Operator,
    Quadrature,
    Grid,
}

/// Radius past which `|chi|^2 < 1e-16` for a Gaussian envelope with the
/// state's quadrature variances, plus room for interference peaks.
pub fn auto_radial_cut(rho: &DensityMatrix) -> Result<f64> {
    let (x2, p2) = quadrature_second_moments(rho)?;
    let narrow = 4.0 * x2.min(p2);
    let wide = 4.0 * x2.max(p2);
    Ok((37.0 / narrow).sqrt().max(2.0 * wide.sqrt() + 6.0).max(8.0))
}

pub fn quadrature_route(rho: &DensityMatrix) -> Result<MeasureResult> {
    let opts = QuadratureOptions {
        radial_cut: auto_radial_cut(rho)?,
        tol: 1e-7,
        max_intervals: 400,
    };
    let mut ev = PhaseSpaceEvaluator::new(rho)?;
    measure_char_quadrature(|xi| ev.chi(xi[0]), 1, &opts)
}

pub fn wigner_grid_of(rho: &DensityMatrix, points: usize) -> Result<macroq_core::phase_space::WignerGrid> {
    let axis = Axis::symmetric(suggest_half_width(rho)?, points)?;
    wigner_of(rho, axis, axis)
}

pub fn grid_route(rho: &DensityMatrix) -> Result<MeasureResult> {
    measure_wigner_grid(&wigner_grid_of(rho, GRID_POINTS)?, &GridOptions::default())
}

pub fn measure_with(rho: &DensityMatrix, route: NumericRoute) -> Result<MeasureResult> {
    match route {
        NumericRoute::Operator => Ok(measure_operator(rho)),
        NumericRoute::Quadrature => quadrature_route(rho),
        NumericRoute::Grid => grid_route(rho),
    }
}
