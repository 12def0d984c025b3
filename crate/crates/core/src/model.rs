//! The nondimensional Leslie–Gower predator–prey field with a strong Allee
//! effect on the prey and a fear factor on the prey birth term:
//!
//! ```text
//! x' = x (1 - x)(x - m) / (1 + lam y) - a x y
//! y' = s y (1 - y / x)
//! ```
//!
//! The field is undefined on `x = 0`; every entry point that takes a
//! [`State`] rejects `x <= 0` instead of clamping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// Nondimensional parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Allee threshold.
    pub m: f64,
    /// Predation pressure coefficient.
    pub a: f64,
    /// Fear intensity.
    pub lam: f64,
    /// Predator growth rate.
    pub s: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

impl Params {
    pub fn new(m: f64, a: f64, lam: f64, s: f64) -> Result<Self> {
        Ok(Self {
            m: positive("m", m)?,
            a: positive("a", a)?,
            lam: positive("lam", lam)?,
            s: positive("s", s)?,
        })
    }

    /// Like [`Params::new`] but also requires `0 < m < 1`.
    pub fn strong_allee(m: f64, a: f64, lam: f64, s: f64) -> Result<Self> {
        let p = Self::new(m, a, lam, s)?;
        p.require_strong_allee()?;
        Ok(p)
    }

    pub fn is_strong_allee(&self) -> bool {
        self.m > 0.0 && self.m < 1.0
    }

    pub fn require_strong_allee(&self) -> Result<()> {
        if self.is_strong_allee() {
            Ok(())
        } else {
            Err(Error::NotStrongAllee(self.m))
        }
    }

    /// Checks positivity of every field; useful after struct-literal construction.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.m, self.a, self.lam, self.s).map(|_| ())
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    pub fn with_lam(self, lam: f64) -> Self {
        Self { lam, ..self }
    }
}

/// Parameters of the dimensional model before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimParams {
    /// Prey birth rate.
    pub r: f64,
    /// Prey carrying capacity.
    pub k: f64,
    /// Allee threshold in density units.
    pub m_dim: f64,
    pub a_dim: f64,
    pub lam_dim: f64,
    pub s_dim: f64,
    /// Ratio between predator and prey carrying capacities.
    pub h: f64,
}

impl DimParams {
    pub fn validate(&self) -> Result<()> {
        positive("r", self.r)?;
        positive("K", self.k)?;
        positive("m_dim", self.m_dim)?;
        positive("a_dim", self.a_dim)?;
        positive("lam_dim", self.lam_dim)?;
        positive("s_dim", self.s_dim)?;
        positive("h", self.h)?;
        Ok(())
    }
}

/// Scales the dimensional model with `x = K X`, `y = h K Y`, `t = T / (r K)`.
pub fn nondimensionalize(d: &DimParams) -> Result<Params> {
    d.validate()?;
    Params::new(
        d.m_dim / d.k,
        d.h * d.a_dim / d.r,
        d.lam_dim * d.h * d.k,
        d.s_dim / (d.r * d.k),
    )
}

/// Dimensional vector field, in the original density and time units.
pub fn dimensional_rhs(d: &DimParams, x: f64, y: f64) -> Result<(f64, f64)> {
    d.validate()?;
    check_domain(x, y)?;
    let dx = d.r * x / (1.0 + d.lam_dim * y) * (1.0 - x / d.k) * (x - d.m_dim) - d.a_dim * x * y;
    let dy = d.s_dim * y * (1.0 - y / (d.h * x));
    Ok((dx, dy))
}

/// A point of the (open) phase domain `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &State) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn check_domain(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x, y })
    }
}

/// The vector field. Errors when `x <= 0`.
pub fn rhs(p: &Params, st: &State) -> Result<(f64, f64)> {
    check_domain(st.x, st.y)?;
    Ok(field(p, st.x, st.y))
}

/// Unchecked field evaluation; callers guarantee `x > 0`.
#[inline]
pub(crate) fn field(p: &Params, x: f64, y: f64) -> (f64, f64) {
    let dx = x * (1.0 - x) * (x - p.m) / (1.0 + p.lam * y) - p.a * x * y;
    let dy = p.s * y * (1.0 - y / x);
    (dx, dy)
}

/// Jacobian from the general partial derivatives, valid at any `x > 0`.
pub fn jacobian(p: &Params, st: &State) -> Result<Mat2> {
    check_domain(st.x, st.y)?;
    Ok(jacobian_unchecked(p, st.x, st.y))
}

pub(crate) fn jacobian_unchecked(p: &Params, x: f64, y: f64) -> Mat2 {
    let (f1x, f2x) = partial_unchecked(p, x, y, 1, 0);
    let (f1y, f2y) = partial_unchecked(p, x, y, 0, 1);
    [[f1x, f1y], [f2x, f2y]]
}

/// Mixed partial derivative `d^(i+j) F / dx^i dy^j` of both components.
pub fn partial(p: &Params, st: &State, i: u32, j: u32) -> Result<(f64, f64)> {
    check_domain(st.x, st.y)?;
    Ok(partial_unchecked(p, st.x, st.y, i, j))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub(crate) fn partial_unchecked(p: &Params, x: f64, y: f64, i: u32, j: u32) -> (f64, f64) {
    // Prey: P(x) R(y) - a x y with P(x) = x (1 - x)(x - m), R(y) = 1 / (1 + lam y).
    let poly = match i {
        0 => x * (1.0 - x) * (x - p.m),
        1 => -3.0 * x * x + 2.0 * (1.0 + p.m) * x - p.m,
        2 => -6.0 * x + 2.0 * (1.0 + p.m),
        3 => -6.0,
        _ => 0.0,
    };
    let denom = 1.0 + p.lam * y;
    let fear = (-p.lam).powi(j as i32) * factorial(j) / denom.powi(j as i32 + 1);
    let bilinear = match (i, j) {
        (0, 0) => x * y,
        (1, 0) => y,
        (0, 1) => x,
        (1, 1) => 1.0,
        _ => 0.0,
    };
    let f1 = poly * fear - p.a * bilinear;

    // Predator: s y - s y^2 / x.
    let linear = match (i, j) {
        (0, 0) => y,
        (0, 1) => 1.0,
        _ => 0.0,
    };
    let ypart = match j {
        0 => y * y,
        1 => 2.0 * y,
        2 => 2.0,
        _ => 0.0,
    };
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let xpart = sign * factorial(i) / x.powi(i as i32 + 1);
    let f2 = p.s * linear - p.s * ypart * xpart;

    (f1, f2)
}

pub fn trace(j: &Mat2) -> f64 {
    j[0][0] + j[1][1]
}

pub fn det(j: &Mat2) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Derivative of the field with respect to `lam`. The predator equation does
/// not depend on `lam`, so the second component is exactly zero.
pub fn d_dlam(p: &Params, st: &State) -> Result<(f64, f64)> {
    check_domain(st.x, st.y)?;
    let (x, y) = (st.x, st.y);
    let denom = 1.0 + p.lam * y;
    Ok((-x * (1.0 - x) * (x - p.m) * y / (denom * denom), 0.0))
}

/// Derivative of the field with respect to `a`.
pub fn d_da(_p: &Params, st: &State) -> Result<(f64, f64)> {
    check_domain(st.x, st.y)?;
    Ok((-st.x * st.y, 0.0))
}
