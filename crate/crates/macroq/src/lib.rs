//! Std companion to `macroq-core`: grid files, seeded random ensembles,
//! the property suite, parameter sweeps and the `macroq` command line.

pub mod check;
pub mod cli;
pub mod ensemble;
pub mod gridfile;
pub mod routes;
pub mod state;
pub mod sweep;
