//! Catalog states selected by name and parameters, with per-family cutoff
//! heuristics and route dispatch.

use macroq_core::catalog::{
    make_coherent, make_decohered_scs, make_dur_state, make_fock, make_ghz, make_maximally_mixed, make_mixture_scs,
    make_noon, make_scs, make_squeezed_vacuum, make_thermal, DecoheredScsParams, GaussianChar, ThermalScsParams,
};
use macroq_core::fock::{suggest_cutoff, DensityMatrix, C64};
use macroq_core::lowrank::{measure_lowrank, to_dense, ProductRankState};
use macroq_core::measure::{measure_char_quadrature, MeasureResult, QuadratureOptions};
use macroq_core::{Error, Result};

use crate::routes::{measure_with, NumericRoute};

/// Largest dense dimension the CLI will build from a product-rank state.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateKind {
    Fock,
    Coherent,
    Scs,
    DecoheredScs,
    MixtureScs,
    Squeezed,
    Thermal,
    MaximallyMixed,
    ThermalScs,
    Ghz,
    Noon,
    Dur,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RouteChoice {
    /// Closed form for thermal-scs, low-rank for ghz/noon/dur, operator otherwise.
    Auto,
    Operator,
    Quadrature,
    Grid,
    ClosedForm,
    LowRank,
}

#[derive(Debug, Clone, clap::Args)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Photon number (fock, noon).
    #[arg(long)]
    pub n: Option<usize>,
    /// Real amplitude (coherent, scs, decohered-scs, mixture-scs).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Imaginary part of the coherent amplitude.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Dimensionless loss time (decohered-scs).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Squeezing parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Mean thermal occupation.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Component variance (thermal-scs).
    #[arg(long)]
    pub v: Option<f64>,
    /// Component displacement (thermal-scs).
    #[arg(long)]
    pub d: Option<f64>,
    /// Number of modes (ghz, dur).
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Qubit angle (dur).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Hilbert-space dimension (maximally-mixed).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Fock cutoff; overrides the per-state heuristic.
    #[arg(long, env = "MACROQ_DEFAULT_CUTOFF")]
    pub cutoff: Option<usize>,
}

fn missing(name: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        reason: "required for this state",
    }
}

fn req<T>(v: Option<T>, name: &'static str) -> Result<T> {
    v.ok_or_else(|| missing(name))
}

/// Truncation where the squeezed-vacuum amplitudes `~ tanh(s)^{n/2}` have
/// fallen below 1e-10 in probability.
pub fn squeezed_cutoff(s: f64) -> usize {
    let th = s.abs().tanh();
    if th < 1e-12 {
        return 4;
    }
    (23.0 / -th.ln()).ceil() as usize + 10
}

/// Geometric tail below 1e-14.
pub fn thermal_cutoff(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 2;
    }
    ((32.0 / (1.0 / nbar).ln_1p()).ceil() as usize + 2).max(4)
}

pub enum BuiltState {
    Dense(DensityMatrix),
    LowRank(ProductRankState),
}

impl StateArgs {
    pub fn new(state: StateKind) -> Self {
        Self {
            state,
            n: None,
            alpha: None,
            alpha_im: 0.0,
            tau: None,
            s: None,
            nbar: None,
            v: None,
            d: None,
            n_modes: None,
            epsilon: None,
            dim: None,
            cutoff: None,
        }
    }

    /// Heuristic cutoff for dense single-mode states, before any override.
    pub fn heuristic_cutoff(&self) -> Result<usize> {
        Ok(match self.state {
            StateKind::Fock => req(self.n, "n")? + 2,
            StateKind::Coherent => suggest_cutoff(C64::new(req(self.alpha, "alpha")?, self.alpha_im).norm_sqr()),
            StateKind::Scs | StateKind::DecoheredScs | StateKind::MixtureScs => {
                suggest_cutoff(req(self.alpha, "alpha")?.powi(2))
            }
            StateKind::Squeezed => squeezed_cutoff(req(self.s, "s")?),
            StateKind::Thermal => thermal_cutoff(req(self.nbar, "nbar")?),
            StateKind::MaximallyMixed => req(self.dim, "dim")?,
            StateKind::ThermalScs | StateKind::Ghz | StateKind::Noon | StateKind::Dur => {
                return Err(Error::InvalidParameter {
                    name: "cutoff",
                    reason: "state has no single-mode dense form",
                })
            }
        })
    }

    pub fn cutoff(&self) -> Result<usize> {
        match self.cutoff {
            Some(c) => Ok(c),
            None => self.heuristic_cutoff(),
        }
    }

    pub fn build(&self) -> Result<BuiltState> {
        let dense = |rho: DensityMatrix| Ok(BuiltState::Dense(rho));
        match self.state {
            StateKind::Ghz => Ok(BuiltState::LowRank(make_ghz(req(self.n_modes, "n_modes")?)?)),
            StateKind::Noon => Ok(BuiltState::LowRank(make_noon(req(self.n, "n")?)?)),
            StateKind::Dur => Ok(BuiltState::LowRank(make_dur_state(
                req(self.n_modes, "n_modes")?,
                req(self.epsilon, "epsilon")?,
            )?)),
            StateKind::ThermalScs => Err(Error::InvalidParameter {
                name: "state",
                reason: "thermal-scs has no Fock-space constructor; use the closed-form or quadrature route",
            }),
            StateKind::Fock => dense(make_fock(req(self.n, "n")?, self.cutoff()?)?.to_density()),
            StateKind::Coherent => {
                let alpha = C64::new(req(self.alpha, "alpha")?, self.alpha_im);
                dense(make_coherent(alpha, self.cutoff()?)?.to_density())
            }
            StateKind::Scs => dense(make_scs(req(self.alpha, "alpha")?, self.cutoff()?)?.to_density()),
            StateKind::DecoheredScs => {
                let p = DecoheredScsParams::from_tau(req(self.alpha, "alpha")?, req(self.tau, "tau")?)?;
                dense(make_decohered_scs(&p, self.cutoff()?)?)
            }
            StateKind::MixtureScs => dense(make_mixture_scs(req(self.alpha, "alpha")?, self.cutoff()?)?),
            StateKind::Squeezed => dense(make_squeezed_vacuum(req(self.s, "s")?, self.cutoff()?)?.to_density()),
            StateKind::Thermal => dense(make_thermal(req(self.nbar, "nbar")?, self.cutoff()?)?),
            StateKind::MaximallyMixed => dense(make_maximally_mixed(req(self.dim, "dim")?)?),
        }
    }

    pub fn dense(&self) -> Result<DensityMatrix> {
        match self.build()? {
            BuiltState::Dense(rho) => Ok(rho),
            BuiltState::LowRank(state) => to_dense(&state, MAX_DENSE_DIM),
        }
    }

    pub fn closed_form(&self) -> Result<MeasureResult> {
        match self.state {
            StateKind::Scs => Ok(DecoheredScsParams::from_tau(req(self.alpha, "alpha")?, 0.0)?.to_result()),
            StateKind::DecoheredScs => {
                Ok(DecoheredScsParams::from_tau(req(self.alpha, "alpha")?, req(self.tau, "tau")?)?.to_result())
            }
            StateKind::Squeezed => Ok(GaussianChar::pure_squeezed(req(self.s, "s")?).to_result()),
            StateKind::Thermal => Ok(GaussianChar::thermal(req(self.nbar, "nbar")?)?.to_result()),
            StateKind::ThermalScs => Ok(self.thermal_scs()?.to_result()),
            _ => Err(Error::InvalidParameter {
                name: "route",
                reason: "no closed form for this state",
            }),
        }
    }

    fn thermal_scs(&self) -> Result<ThermalScsParams> {
        ThermalScsParams::new(req(self.v, "v")?, req(self.d, "d")?)
    }

    pub fn measure(&self, route: RouteChoice) -> Result<MeasureResult> {
        let numeric = |r: NumericRoute| -> Result<MeasureResult> {
            if self.state == StateKind::ThermalScs {
                if r == NumericRoute::Quadrature {
                    return thermal_scs_quadrature(&self.thermal_scs()?);
                }
                return Err(Error::InvalidParameter {
                    name: "route",
                    reason: "thermal-scs supports closed-form and quadrature routes only",
                });
            }
            measure_with(&self.dense()?, r)
        };
        match route {
            RouteChoice::Auto => match self.state {
                StateKind::ThermalScs => self.closed_form(),
                _ => match self.build()? {
                    BuiltState::Dense(rho) => measure_with(&rho, NumericRoute::Operator),
                    BuiltState::LowRank(state) => Ok(measure_lowrank(&state)),
                },
            },
            RouteChoice::Operator => numeric(NumericRoute::Operator),
            RouteChoice::Quadrature => numeric(NumericRoute::Quadrature),
            RouteChoice::Grid => numeric(NumericRoute::Grid),
            RouteChoice::ClosedForm => self.closed_form(),
            RouteChoice::LowRank => match self.build()? {
                BuiltState::LowRank(state) => Ok(measure_lowrank(&state)),
                BuiltState::Dense(_) => Err(Error::InvalidParameter {
                    name: "route",
                    reason: "low-rank route needs ghz, noon or dur",
                }),
            },
        }
    }
}

/// Quadrature over the analytic characteristic function of the thermal cat.
pub fn thermal_scs_quadrature(p: &ThermalScsParams) -> Result<MeasureResult> {
    let opts = QuadratureOptions {
        radial_cut: 2.0 * p.d + 7.0 * p.v.sqrt() + 8.0,
        tol: 1e-9,
        max_intervals: 2000,
    };
    measure_char_quadrature(|xi| C64::new(p.char_at(xi[0]), 0.0), 1, &opts)
}
