//! Equilibrium, stability and bifurcation analysis of a Leslie–Gower
//! predator–prey model with a strong Allee effect and a fear factor, with an
//! adaptive integrator for cross-checking the local analysis against
//! simulation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod equilibria;
pub mod errata;
mod error;
pub mod integrate;
pub mod model;
pub mod stability;

pub use equilibria::{Equilibrium, EquilibriumKind, ExistenceRegime, RegimeLabel, RegimeReason};
pub use error::{Error, Result};
pub use model::{DimParams, Mat2, Params, State};
pub use stability::{LinearAnalysis, StabilityLabel};
