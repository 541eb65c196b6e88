//! Steady states and resonance-fluorescence spectra of a four-level ladder
//! atom (levels 1-2-3-4) driven on each adjacent transition by a classical
//! field.
//!
//! All rates and frequencies are expressed in units of a reference
//! linewidth. The density matrix is carried as a 15-component vector (six
//! coherences, three excited populations, six conjugate coherences) with the
//! ground population eliminated through the trace, so the dynamics is the
//! affine system `d psi/dt = M psi + C`.
//!
//! Enable the default `parallel` feature to evaluate frequency grids and
//! sweeps on the rayon pool; results are identical either way.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod qrt;
pub mod spectrum;
pub mod steadystate;
pub mod sweeps;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{build_liouvillian, validate_params, CSign, Liouvillian, StateVector, SystemParams, ValidatedParams};
pub use spectrum::{Method, SpectrumSeries, Transition};
