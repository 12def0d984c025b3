use thiserror::Error;

use crate::equilibria::EquilibriumKind;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state outside the model domain: x = {x}, y = {y} (need x > 0, y >= 0)")]
    OutsideDomain { x: f64, y: f64 },

    #[error("m = {0} is not in (0, 1); the strong Allee regime is required")]
    NotStrongAllee(f64),

    #[error("{0}")]
    Domain(String),

    #[error("equilibrium {kind:?} does not exist for these parameters")]
    MissingEquilibrium { kind: EquilibriumKind },

    #[error("point ({x}, {y}) is not an equilibrium (|rhs| = {residual:e})")]
    NotEquilibrium { x: f64, y: f64, residual: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid integrator configuration: {0}")]
    Config(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Integration { .. } | Error::Inconclusive(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
