//! Interference-based macroscopicity of bosonic states: dense and low-rank
//! state representations, three evaluation routes, amplitude-damping
//! dynamics and analytic oracles.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod catalog;
pub mod error;
pub mod fock;
pub mod lindblad;
pub mod lowrank;
pub mod measure;
pub mod phase_space;
pub mod quadrature;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, Ket, ModeCutoffs, C64};
pub use measure::{MeasureResult, Route, Warning};
