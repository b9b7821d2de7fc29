//! Solvers for a second-order traffic-flow model that enforces both a jam
//! density `ρ*` and a maximal velocity `u*`.
//!
//! - [`model`]: pressure law, pseudo-velocity, conversions, fundamental diagrams
//! - [`riemann`]: exact Riemann solver
//! - [`scheme1d`]: Godunov and Godunov–Glimm schemes in one dimension
//! - [`solver2d`]: Strang-split two-dimensional solver
//! - [`micro`]: follow-the-leader vehicle dynamics

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod micro;
pub mod model;
pub mod riemann;
pub mod scheme1d;
pub mod solver2d;
pub mod sweep;
pub mod vdc;

pub use error::{Error, Result};
pub use model::{ConservedState, Model, ModelKind, ModelParams, PrimitiveState};
pub use riemann::{RiemannFan, WavePattern};
pub use sweep::{Boundary, Scheme};
pub use vdc::{van_der_corput, VdcSampler};
