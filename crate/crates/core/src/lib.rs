//! Exact Riemann solver and first-order Godunov scheme for the 4x4
//! generalized Saint-Venant system with frozen (non-relaxing) stresses.
//!
//! Modules, bottom-up:
//!
//! - [`model`]: parameters, states, pressure, invariants, eigenstructure, free energy.
//! - [`waves`]: shock and rarefaction curves at frozen stretch invariants.
//! - [`riemann`]: exact solution of the Riemann problem, sampling, Godunov flux.
//! - [`fv`]: finite-volume driver with an optional relaxation split step.
//! - [`validation`]: independent oracles and property sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fv;
pub mod model;
pub mod quadrature;
pub mod riemann;
pub mod roots;
pub mod validation;
pub mod waves;

pub use error::{Error, Result};
pub use model::{ConservedState, Invariants, Params, PrimitiveState};
pub use riemann::{RiemannSolution, Wave, WaveField, WaveKind};
pub use waves::{CurveBranch, CurveSide, WaveFamily};
