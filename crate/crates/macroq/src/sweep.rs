//! Parameter sweeps written as CSV `param,axis_value,I,mean_n,purity`.
//!
//! Decoherence families use the normalized time `r = sqrt(1 - e^{-tau})`
//! or `tau` itself as the axis. Closed forms are used unless a numeric
//! route is forced; a forced route falls back to the closed form for
//! curves whose heuristic Fock cutoff exceeds [`NUMERIC_CUTOFF_LIMIT`]
//! (the alpha = 27.3 and s >= 2.1 presets).

use std::fmt::Write as _;

use macroq_core::catalog::{
    gaussian_decohere, make_dur_state, make_scs, make_squeezed_vacuum, DecoheredScsParams, GaussianChar,
    ThermalScsParams,
};
use macroq_core::fock::suggest_cutoff;
use macroq_core::lindblad::apply_loss;
use macroq_core::lowrank::{measure_lowrank, to_dense};
use macroq_core::measure::{measure_operator, MeasureResult};
use macroq_core::{Error, Result};
use rayon::prelude::*;

use crate::routes::{measure_with, NumericRoute};
use crate::state::{squeezed_cutoff, thermal_scs_quadrature, MAX_DENSE_DIM};

pub const NUMERIC_CUTOFF_LIMIT: usize = 400;
pub const CSV_HEADER: &str = "param,axis_value,I,mean_n,purity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    ScsDecoherence,
    GaussianDecoherence,
    ThermalScs,
    Dur,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    Tau,
    R,
    V,
    D,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig1a,
    Fig1b,
    ThermalScs,
    Dur,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    /// One curve per entry: alpha, s, the fixed partner of a thermal-scs
    /// axis (d for axis V, V for axis d), or epsilon.
    pub params: Vec<f64>,
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
    pub log_spaced: bool,
    pub route: Option<NumericRoute>,
    pub cutoff: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub axis_value: f64,
    pub value: f64,
    pub mean_n: f64,
    pub purity: f64,
}

fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

impl SweepSpec {
    pub fn preset(p: Preset) -> Self {
        let base = |family, params: Vec<f64>, axis, start, stop, samples, log_spaced| SweepSpec {
            family,
            params,
            axis,
            start,
            stop,
            samples,
            log_spaced,
            route: None,
            cutoff: None,
        };
        match p {
            Preset::Fig1a => base(
                Family::ScsDecoherence,
                vec![2.0, 4.0, 6.0, 27.3],
                SweepAxis::R,
                0.0,
                1.0,
                101,
                false,
            ),
            Preset::Fig1b => base(
                Family::GaussianDecoherence,
                vec![1.5, 2.1, 2.5, 7.0],
                SweepAxis::R,
                0.0,
                1.0,
                101,
                false,
            ),
            Preset::ThermalScs => base(Family::ThermalScs, vec![0.0], SweepAxis::V, 1.0, 1e4, 41, true),
            Preset::Dur => base(Family::Dur, vec![0.1], SweepAxis::N, 1.0, 1000.0, 31, true),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(invalid("samples", "must be >= 2"));
        }
        if self.params.is_empty() {
            return Err(invalid("params", "need at least one curve parameter"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return Err(invalid("range", "need finite start <= stop"));
        }
        if self.log_spaced && self.start <= 0.0 {
            return Err(invalid("range", "log spacing needs start > 0"));
        }
        let axes_ok = match self.family {
            Family::ScsDecoherence | Family::GaussianDecoherence => matches!(self.axis, SweepAxis::R | SweepAxis::Tau),
            Family::ThermalScs => matches!(self.axis, SweepAxis::V | SweepAxis::D),
            Family::Dur => self.axis == SweepAxis::N,
        };
        if !axes_ok {
            return Err(invalid("axis", "not an axis of this family"));
        }
        match self.axis {
            SweepAxis::R if self.start < 0.0 || self.stop > 1.0 => {
                return Err(invalid("range", "r must lie in [0, 1]"))
            }
            SweepAxis::Tau | SweepAxis::D if self.start < 0.0 => return Err(invalid("range", "must be >= 0")),
            SweepAxis::V if self.start < 1.0 => return Err(invalid("range", "V must be >= 1")),
            SweepAxis::N if self.start < 1.0 => return Err(invalid("range", "N must be >= 1")),
            _ => {}
        }
        let params_ok = match self.family {
            Family::ScsDecoherence => self.params.iter().all(|&a| a > 0.0),
            Family::GaussianDecoherence => self.params.iter().all(|s| s.is_finite()),
            Family::ThermalScs if self.axis == SweepAxis::V => self.params.iter().all(|&d| d >= 0.0),
            Family::ThermalScs => self.params.iter().all(|&v| v >= 1.0),
            Family::Dur => self.params.iter().all(|&e| e > 0.0 && e <= std::f64::consts::FRAC_PI_2),
        };
        if !params_ok {
            return Err(invalid("params", "outside the family domain"));
        }
        if let Some(route) = self.route {
            let ok = match self.family {
                Family::ThermalScs => route == NumericRoute::Quadrature,
                Family::Dur => route == NumericRoute::Operator,
                _ => true,
            };
            if !ok {
                return Err(invalid("route", "route not available for this family"));
            }
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.samples;
        let raw: Vec<f64> = (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    self.stop
                } else if self.log_spaced {
                    (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + f * (self.stop - self.start)
                }
            })
            .collect();
        if self.axis == SweepAxis::N {
            let mut ns: Vec<f64> = raw.iter().map(|v| v.round()).collect();
            ns.dedup();
            ns
        } else {
            raw
        }
    }

    fn decay_of(&self, x: f64) -> f64 {
        match self.axis {
            SweepAxis::R => 1.0 - x * x,
            _ => (-x).exp(),
        }
    }

    fn point(&self, param: f64, x: f64) -> Result<MeasureResult> {
        match self.family {
            Family::ScsDecoherence => {
                let p = DecoheredScsParams::from_decay(param, self.decay_of(x))?;
                match self.numeric_cutoff(suggest_cutoff(param * param)) {
                    Some((route, cutoff)) => {
                        let rho = apply_loss(&make_scs(param, cutoff)?.to_density(), p.decay)?;
                        measure_with(&rho, route)
                    }
                    None => Ok(p.to_result()),
                }
            }
            Family::GaussianDecoherence => {
                let decay = self.decay_of(x);
                match self.numeric_cutoff(squeezed_cutoff(param)) {
                    Some((route, cutoff)) => {
                        let rho = apply_loss(&make_squeezed_vacuum(param, cutoff)?.to_density(), decay)?;
                        measure_with(&rho, route)
                    }
                    // decay = 0 maps to tau = inf, which decohere handles
                    None => Ok(gaussian_decohere(&GaussianChar::pure_squeezed(param), -decay.ln()).to_result()),
                }
            }
            Family::ThermalScs => {
                let p = match self.axis {
                    SweepAxis::V => ThermalScsParams::new(x, param)?,
                    _ => ThermalScsParams::new(param, x)?,
                };
                match self.route {
                    Some(_) => thermal_scs_quadrature(&p),
                    None => Ok(p.to_result()),
                }
            }
            Family::Dur => {
                let state = make_dur_state(x as usize, param)?;
                match self.route {
                    Some(_) => Ok(measure_operator(&to_dense(&state, MAX_DENSE_DIM)?)),
                    None => Ok(measure_lowrank(&state)),
                }
            }
        }
    }

    /// Route and cutoff for a forced numeric evaluation, or `None` for the
    /// closed form.
    fn numeric_cutoff(&self, heuristic: usize) -> Option<(NumericRoute, usize)> {
        let route = self.route?;
        match self.cutoff {
            Some(c) => Some((route, c)),
            None if heuristic <= NUMERIC_CUTOFF_LIMIT => Some((route, heuristic)),
            None => None,
        }
    }

    /// Rows in curve-major, axis-minor order regardless of scheduling.
    pub fn run(&self) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let xs = self.axis_values();
        let jobs: Vec<(f64, f64)> = self
            .params
            .iter()
            .flat_map(|&p| xs.iter().map(move |&x| (p, x)))
            .collect();
        jobs.par_iter()
            .map(|&(param, axis_value)| {
                let r = self.point(param, axis_value)?;
                Ok(SweepRow {
                    param,
                    axis_value,
                    value: r.value,
                    mean_n: r.mean_n,
                    purity: r.purity,
                })
            })
            .collect()
    }
}

/// 12 significant digits, exponent form; independent of locale.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt12(r.param),
            fmt12(r.axis_value),
            fmt12(r.value),
            fmt12(r.mean_n),
            fmt12(r.purity)
        )
        .unwrap();
    }
    out
}

pub fn parse_csv(text: &str) -> Option<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next()? != CSV_HEADER {
        return None;
    }
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|t| t.parse().ok()).collect::<Option<_>>()?;
            (v.len() == 5).then(|| SweepRow {
                param: v[0],
                axis_value: v[1],
                value: v[2],
                mean_n: v[3],
                purity: v[4],
            })
        })
        .collect()
}
