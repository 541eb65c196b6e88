//! Physical parameters, the 15-component state vector and the affine
//! generator of the rotating-frame density-matrix equations.

mod liouvillian;
mod params;
mod state;

pub use liouvillian::{build_liouvillian, build_liouvillian_with_sign, CSign, Liouvillian};
pub use params::{validate_params, ConstraintCheck, SystemParams, ValidatedParams, CLOSURE_TOL};
pub use state::{component_label, conjugate_index, StateReport, StateVector, COMPONENTS};
