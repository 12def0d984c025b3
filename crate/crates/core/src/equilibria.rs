//! Boundary and interior equilibria.
//!
//! Interior equilibria lie on the diagonal `y = x` and solve
//! `(1 + lam a) x^2 - (1 + m - a) x + m = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Params, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    /// `(1, 0)`: prey at carrying capacity, no predator.
    E1,
    /// `(m, 0)`: prey at the Allee threshold, no predator.
    E2,
    /// Double interior root at the fold.
    E3,
    /// Smaller of two interior roots.
    E4,
    /// Larger of two interior roots.
    E5,
}

impl EquilibriumKind {
    pub fn is_interior(self) -> bool {
        matches!(self, Self::E3 | Self::E4 | Self::E5)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::E1 => "E1",
            Self::E2 => "E2",
            Self::E3 => "E3",
            Self::E4 => "E4",
            Self::E5 => "E5",
        }
    }
}

impl std::fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub y: f64,
    pub kind: EquilibriumKind,
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    NoInterior,
    OneDegenerate,
    TwoInterior,
}

/// Which existence condition decided the regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeReason {
    /// `a >= m + 1`: the quadratic has no positive root at all.
    PredationExceedsAllee,
    /// `a1* <= a < m + 1`.
    AboveCompetitionThreshold,
    /// `0 < a < a1*` and `lam > lam_sn`.
    FearAboveCritical,
    /// `0 < a < a1*` and `lam = lam_sn`.
    FearAtCritical,
    /// `0 < a < a1*` and `lam < lam_sn`.
    FearBelowCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceRegime {
    pub label: RegimeLabel,
    pub delta: f64,
    pub a1_star: f64,
    /// Fold value of the fear intensity; `None` unless `a < a1*`.
    pub lam_crit: Option<f64>,
    pub reason: RegimeReason,
}

fn require_unit_interval(m: f64) -> Result<()> {
    if m > 0.0 && m < 1.0 {
        Ok(())
    } else {
        Err(Error::NotStrongAllee(m))
    }
}

/// `a1* = m + 1 - 2 sqrt(m)`, the predation level above which no interior
/// equilibrium exists for any fear intensity.
pub fn allee_competition_threshold(m: f64) -> Result<f64> {
    require_unit_interval(m)?;
    let r = m.sqrt();
    // (1 - sqrt m)^2, written without the cancellation of m + 1 - 2 sqrt(m)
    Ok((1.0 - r) * (1.0 - r))
}

/// `a^2 - 2 (m + 1) a + (m - 1)^2`.
fn fold_numerator(m: f64, a: f64) -> f64 {
    a * a - 2.0 * (m + 1.0) * a + (m - 1.0) * (m - 1.0)
}

/// Fear intensity at which the two interior equilibria collide.
pub fn critical_fear(m: f64, a: f64) -> Result<f64> {
    let a1 = allee_competition_threshold(m)?;
    if !(a > 0.0 && a < a1) {
        return Err(Error::domain(format!(
            "critical fear intensity needs 0 < a < a1* = {a1}, got a = {a}"
        )));
    }
    let lam = fold_numerator(m, a) / (4.0 * m * a);
    if lam > 0.0 {
        Ok(lam)
    } else {
        Err(Error::domain(format!(
            "fold numerator is not positive at m = {m}, a = {a}"
        )))
    }
}

/// Discriminant of the interior quadratic.
pub fn discriminant(p: &Params) -> f64 {
    let b = p.m + 1.0 - p.a;
    b * b - 4.0 * p.m * (1.0 + p.lam * p.a)
}

/// Tolerance under which the discriminant counts as zero.
pub fn discriminant_tolerance(p: &Params) -> f64 {
    let b = p.m + 1.0 - p.a;
    1e-12 * (b * b).max(1.0)
}

pub fn boundary_equilibria(p: &Params) -> [Equilibrium; 2] {
    [
        Equilibrium {
            x: 1.0,
            y: 0.0,
            kind: EquilibriumKind::E1,
        },
        Equilibrium {
            x: p.m,
            y: 0.0,
            kind: EquilibriumKind::E2,
        },
    ]
}

/// Interior equilibria, ordered by increasing `x`.
pub fn interior_equilibria(p: &Params) -> Result<Vec<Equilibrium>> {
    p.require_strong_allee()?;
    let b = 1.0 + p.m - p.a;
    if b <= 0.0 {
        return Ok(Vec::new());
    }
    let lead = 1.0 + p.lam * p.a;
    let delta = discriminant(p);
    let at = |x: f64, kind| Equilibrium { x, y: x, kind };
    if delta.abs() < discriminant_tolerance(p) {
        return Ok(vec![at(b / (2.0 * lead), EquilibriumKind::E3)]);
    }
    if delta < 0.0 {
        return Ok(Vec::new());
    }
    // Larger root first, the smaller one from the product of roots m / lead.
    let x5 = (b + delta.sqrt()) / (2.0 * lead);
    let x4 = p.m / (lead * x5);
    Ok(vec![
        at(x4, EquilibriumKind::E4),
        at(x5, EquilibriumKind::E5),
    ])
}

/// Every equilibrium, boundary ones first.
pub fn equilibria(p: &Params) -> Result<Vec<Equilibrium>> {
    let mut all = boundary_equilibria(p).to_vec();
    all.extend(interior_equilibria(p)?);
    Ok(all)
}

pub fn find_equilibrium(p: &Params, kind: EquilibriumKind) -> Result<Equilibrium> {
    equilibria(p)?
        .into_iter()
        .find(|e| e.kind == kind)
        .ok_or(Error::MissingEquilibrium { kind })
}

pub fn existence_regime(p: &Params) -> Result<ExistenceRegime> {
    p.require_strong_allee()?;
    let a1_star = allee_competition_threshold(p.m)?;
    let delta = discriminant(p);
    let lam_crit = critical_fear(p.m, p.a).ok();
    let (label, reason) = if p.a >= p.m + 1.0 {
        (RegimeLabel::NoInterior, RegimeReason::PredationExceedsAllee)
    } else if p.a >= a1_star {
        (
            RegimeLabel::NoInterior,
            RegimeReason::AboveCompetitionThreshold,
        )
    } else if delta.abs() < discriminant_tolerance(p) {
        (RegimeLabel::OneDegenerate, RegimeReason::FearAtCritical)
    } else if delta > 0.0 {
        (RegimeLabel::TwoInterior, RegimeReason::FearBelowCritical)
    } else {
        (RegimeLabel::NoInterior, RegimeReason::FearAboveCritical)
    };
    Ok(ExistenceRegime {
        label,
        delta,
        a1_star,
        lam_crit,
        reason,
    })
}
