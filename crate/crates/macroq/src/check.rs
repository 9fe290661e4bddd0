//! Seeded property suite behind `macroq check`.
//!
//! Every property reports a signed margin: tolerance minus worst observed
//! deviation, so a property passes exactly when its margin is non-negative
//! (strictly positive for the strict inequality).

use std::fmt::Write as _;

use macroq_core::catalog::{
    make_coherent, make_decohered_scs, make_fock, make_scs, make_squeezed_vacuum, make_thermal, DecoheredScsParams,
};
use macroq_core::fock::{apply_displacement, apply_rotation, mean_number, purity, DensityMatrix, ModeCutoffs, C64};
use macroq_core::lindblad::{evolve, lindblad_rhs, EvolutionSpec};
use macroq_core::measure::{
    measure_char_quadrature, measure_wigner_grid, operator_terms, GridOptions, QuadratureOptions,
};
use macroq_core::phase_space::PhaseSpaceEvaluator;
use macroq_core::Result;
use rayon::prelude::*;

use crate::ensemble::StateSampler;
use crate::routes::{auto_radial_cut, wigner_grid_of, GRID_POINTS};

pub const DEFAULT_SEED: u64 = 20240917;
pub const DEFAULT_ENSEMBLE: usize = 500;
pub const DEFAULT_CUTOFF: usize = 6;

pub const BOUND_TOL: f64 = 1e-9;
pub const STRICT_PURITY: f64 = 1.0 - 1e-6;
pub const EQUALITY_JUMP_TOL: f64 = 1e-12;
pub const LINDBLAD_TOL: f64 = 1e-12;
pub const ROTATION_TOL: f64 = 1e-10;
pub const DISPLACEMENT_TOL: f64 = 1e-5;
pub const TRIANGLE_TOL: f64 = 1e-3;
pub const PURITY_RATE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub seed: u64,
    /// Number of random mixed states; the pure ensemble has the same size.
    pub ensemble: usize,
    pub cutoff: usize,
    /// Flips the sign of the jump term, for mutation testing of the suite.
    pub inject_fault: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            ensemble: DEFAULT_ENSEMBLE,
            cutoff: DEFAULT_CUTOFF,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub seed: u64,
    pub ensemble: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyOutcome> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "seed={} ensemble={}", self.seed, self.ensemble).unwrap();
        for p in &self.properties {
            writeln!(
                out,
                "{} {:<24} margin={:+.11e} samples={}",
                if p.passed { "PASS" } else { "FAIL" },
                p.name,
                p.margin,
                p.samples
            )
            .unwrap();
        }
        writeln!(
            out,
            "{}",
            if self.all_passed() {
                "all properties passed"
            } else {
                "property failures"
            }
        )
        .unwrap();
        out
    }
}

/// Operator-route value as seen by the suite, optionally with the fault.
fn suite_measure(rho: &DensityMatrix, fault: bool) -> (f64, f64) {
    let t = operator_terms(rho);
    let value = if fault { t.number + t.jump } else { t.number - t.jump };
    (value, t.jump)
}

struct Sample {
    value: f64,
    jump: f64,
    mean_n: f64,
    purity: f64,
}

fn sample(rho: DensityMatrix, fault: bool) -> Sample {
    let (value, jump) = suite_measure(&rho, fault);
    Sample {
        mean_n: mean_number(&rho),
        purity: purity(&rho),
        value,
        jump,
    }
}

fn outcome(name: &'static str, margin: f64, samples: usize) -> PropertyOutcome {
    PropertyOutcome {
        name,
        passed: margin >= 0.0,
        margin,
        samples,
    }
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

/// Bound, strict inequality and equality condition over the seeded random
/// ensembles.
pub fn theorem_properties(cfg: &CheckConfig) -> Result<Vec<PropertyOutcome>> {
    let cut = ModeCutoffs::single(cfg.cutoff)?;
    let mut mixed_rng = StateSampler::stream(cfg.seed, 0);
    let mut pure_rng = StateSampler::stream(cfg.seed, 1);
    let mut states = Vec::with_capacity(2 * cfg.ensemble);
    for _ in 0..cfg.ensemble {
        states.push(mixed_rng.mixed(&cut)?);
    }
    for k in 0..cfg.ensemble {
        let ket = if k % 2 == 0 {
            pure_rng.pure(&cut)?
        } else {
            pure_rng.pure_even(cfg.cutoff)?
        };
        states.push(ket.to_density());
    }
    let samples: Vec<Sample> = states
        .into_par_iter()
        .map(|rho| sample(rho, cfg.inject_fault))
        .collect();

    let bound = min_of(samples.iter().map(|s| s.mean_n + BOUND_TOL - s.value));

    let mixed: Vec<&Sample> = samples.iter().filter(|s| s.purity < STRICT_PURITY).collect();
    let strict_margin = min_of(mixed.iter().map(|s| s.mean_n - s.value));
    let strict = PropertyOutcome {
        name: "strict-inequality",
        passed: strict_margin > 0.0,
        margin: strict_margin,
        samples: mixed.len(),
    };

    // equality within BOUND_TOL must coincide with a vanishing jump overlap
    let equality = min_of(samples.iter().map(|s| {
        let gap = (s.mean_n - s.value).abs();
        if s.jump <= EQUALITY_JUMP_TOL {
            BOUND_TOL - gap
        } else {
            gap - BOUND_TOL
        }
    }));

    Ok(vec![
        outcome("bound", bound, samples.len()),
        strict,
        outcome("equality-condition", equality, samples.len()),
    ])
}

fn lindblad_identity(cfg: &CheckConfig, states: &[DensityMatrix]) -> PropertyOutcome {
    let margins: Vec<f64> = states
        .par_iter()
        .map(|rho| {
            let tr = (rho.data() * lindblad_rhs(rho)).trace().re;
            LINDBLAD_TOL - (suite_measure(rho, cfg.inject_fault).0 + tr).abs()
        })
        .collect();
    let margin = min_of(margins.into_iter());
    outcome("lindblad-identity", margin, states.len())
}

fn rotation_invariance(cfg: &CheckConfig, states: &[DensityMatrix]) -> Result<PropertyOutcome> {
    let mut rng = StateSampler::stream(cfg.seed, 2);
    let thetas: Vec<f64> = states.iter().map(|_| rng.uniform(0.0, std::f64::consts::TAU)).collect();
    let deltas: Result<Vec<f64>> = states
        .par_iter()
        .zip(thetas.par_iter())
        .map(|(rho, &theta)| {
            let rotated = apply_rotation(rho, &[theta])?;
            Ok((suite_measure(&rotated, cfg.inject_fault).0 - suite_measure(rho, cfg.inject_fault).0).abs())
        })
        .collect();
    let worst = deltas?.into_iter().fold(0.0, f64::max);
    Ok(outcome("rotation-invariance", ROTATION_TOL - worst, states.len()))
}

fn catalog_states() -> Result<Vec<(&'static str, DensityMatrix)>> {
    Ok(vec![
        ("vacuum", make_fock(0, 12)?.to_density()),
        ("fock1", make_fock(1, 12)?.to_density()),
        ("coherent1", make_coherent(C64::new(1.0, 0.0), 30)?.to_density()),
        ("scs1.5", make_scs(1.5, 40)?.to_density()),
        (
            "decohered",
            make_decohered_scs(&DecoheredScsParams::from_tau(1.5, 0.3)?, 40)?,
        ),
        ("squeezed1", make_squeezed_vacuum(1.0, 60)?.to_density()),
        ("thermal0.5", make_thermal(0.5, 40)?),
    ])
}

fn displacement_invariance(cfg: &CheckConfig) -> Result<PropertyOutcome> {
    let mut rng = StateSampler::stream(cfg.seed, 3);
    let states = [
        make_scs(1.0, 60)?.to_density(),
        make_coherent(C64::new(0.3, -0.4), 60)?.to_density(),
        make_fock(2, 60)?.to_density(),
        make_thermal(0.3, 60)?,
        make_squeezed_vacuum(0.5, 60)?.to_density(),
    ];
    let betas: Vec<C64> = states
        .iter()
        .map(|_| C64::from_polar(rng.uniform(0.0, 1.0), rng.uniform(0.0, std::f64::consts::TAU)))
        .collect();
    let mut worst: f64 = 0.0;
    for (rho, beta) in states.iter().zip(&betas) {
        let moved = apply_displacement(rho, &[*beta])?;
        worst = worst.max((suite_measure(&moved, cfg.inject_fault).0 - suite_measure(rho, cfg.inject_fault).0).abs());
    }
    Ok(outcome(
        "displacement-invariance",
        DISPLACEMENT_TOL - worst,
        states.len(),
    ))
}

fn route_triangle(cfg: &CheckConfig) -> Result<PropertyOutcome> {
    let states = catalog_states()?;
    let margins: Result<Vec<f64>> = states
        .par_iter()
        .map(|(_, rho)| {
            let op = suite_measure(rho, cfg.inject_fault).0;
            let opts = QuadratureOptions {
                radial_cut: auto_radial_cut(rho)?,
                tol: 1e-7,
                max_intervals: 400,
            };
            let mut ev = PhaseSpaceEvaluator::new(rho)?;
            let quad = measure_char_quadrature(|xi| ev.chi(xi[0]), 1, &opts)?;
            let grid = measure_wigner_grid(&wigner_grid_of(rho, GRID_POINTS)?, &GridOptions::default())?;
            let tol = TRIANGLE_TOL.max(quad.err_estimate + grid.err_estimate);
            let worst = (op - quad.value)
                .abs()
                .max((op - grid.value).abs())
                .max((quad.value - grid.value).abs());
            Ok(tol - worst)
        })
        .collect();
    Ok(outcome("route-triangle", min_of(margins?.into_iter()), states.len()))
}

/// `|dP/dtau + 2 I|` along RK4 trajectories, with a 5-point centred
/// derivative at the record spacing.
pub fn purity_rate_margin(rho0: &DensityMatrix, tau_max: f64, step: f64, fault: bool) -> Result<f64> {
    let traj = evolve(rho0, &EvolutionSpec::new(tau_max, step, 1)?)?;
    let mut worst: f64 = 0.0;
    for k in 2..traj.len().saturating_sub(2) {
        let h = traj[k + 1].tau - traj[k].tau;
        let dp = (traj[k - 2].purity - 8.0 * traj[k - 1].purity + 8.0 * traj[k + 1].purity - traj[k + 2].purity)
            / (12.0 * h);
        worst = worst.max((dp + 2.0 * suite_measure(&traj[k].rho, fault).0).abs());
    }
    Ok(PURITY_RATE_TOL - worst)
}

fn purity_rate(cfg: &CheckConfig, states: &[DensityMatrix]) -> Result<PropertyOutcome> {
    let mut starts: Vec<DensityMatrix> = states.iter().take(8).cloned().collect();
    starts.push(make_scs(2.0, 40)?.to_density());
    let margins: Result<Vec<f64>> = starts
        .par_iter()
        .map(|rho| purity_rate_margin(rho, 0.1, 0.0025, cfg.inject_fault))
        .collect();
    Ok(outcome("purity-rate", min_of(margins?.into_iter()), starts.len()))
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckReport> {
    let mut properties = theorem_properties(cfg)?;
    let cut = ModeCutoffs::single(cfg.cutoff)?;
    let mut rng = StateSampler::stream(cfg.seed, 4);
    let probe_count = cfg.ensemble.clamp(1, 50);
    let probes: Vec<DensityMatrix> = (0..probe_count).map(|_| rng.mixed(&cut)).collect::<Result<_>>()?;
    properties.push(lindblad_identity(cfg, &probes));
    properties.push(rotation_invariance(cfg, &probes)?);
    properties.push(displacement_invariance(cfg)?);
    properties.push(route_triangle(cfg)?);
    properties.push(purity_rate(cfg, &probes)?);
    Ok(CheckReport {
        seed: cfg.seed,
        ensemble: cfg.ensemble,
        properties,
    })
}
