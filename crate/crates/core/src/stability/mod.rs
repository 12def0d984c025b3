//! Linearized stability of the equilibria and the trace thresholds that
//! govern them.

mod blowup;

pub use blowup::{
    blowup_field, blowup_jacobian, far_chart_field, far_chart_jacobian, origin_blowup,
    BlowupReport, DivisorSingularity, OriginVerdict,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibria::{
    discriminant, discriminant_tolerance, interior_equilibria, Equilibrium, EquilibriumKind,
};
use crate::error::{Error, Result};
use crate::model::{self, Mat2, Params};

/// Residual of the vector field below which a point counts as an equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityLabel {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    WeakCenter,
    SaddleNodeDegenerate,
    NilpotentDegenerate,
}

impl StabilityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Saddle => "saddle",
            Self::StableNode => "stable_node",
            Self::UnstableNode => "unstable_node",
            Self::StableFocus => "stable_focus",
            Self::UnstableFocus => "unstable_focus",
            Self::WeakCenter => "weak_center",
            Self::SaddleNodeDegenerate => "saddle_node_degenerate",
            Self::NilpotentDegenerate => "nilpotent_degenerate",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Self::StableNode | Self::StableFocus)
    }

    pub fn is_unstable_antisaddle(self) -> bool {
        matches!(self, Self::UnstableNode | Self::UnstableFocus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearAnalysis {
    pub jac: Mat2,
    pub trace: f64,
    pub det: f64,
    pub eigs: [Complex64; 2],
    pub label: StabilityLabel,
}

/// Eigenvalues of a real 2x2 matrix from its trace and determinant.
pub fn eigenvalues(trace: f64, det: f64) -> [Complex64; 2] {
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // larger-magnitude root first, the other from the product
        let big = 0.5 * (trace + trace.signum() * root);
        if big == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let small = det / big;
        let (lo, hi) = if big < small {
            (big, small)
        } else {
            (small, big)
        };
        [Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [
            Complex64::new(0.5 * trace, -im),
            Complex64::new(0.5 * trace, im),
        ]
    }
}

fn label_for(trace: f64, det: f64, scale: f64) -> StabilityLabel {
    let det_tol = 1e-12 * scale.max(1.0);
    let trace_tol = 1e-9 * det.abs().max(1.0);
    if det.abs() <= det_tol {
        if trace.abs() <= trace_tol {
            StabilityLabel::NilpotentDegenerate
        } else {
            StabilityLabel::SaddleNodeDegenerate
        }
    } else if det < 0.0 {
        StabilityLabel::Saddle
    } else if trace.abs() <= trace_tol {
        StabilityLabel::WeakCenter
    } else {
        // ties go to the node variant
        let node = trace * trace - 4.0 * det > -1e-12;
        match (trace < 0.0, node) {
            (true, true) => StabilityLabel::StableNode,
            (true, false) => StabilityLabel::StableFocus,
            (false, true) => StabilityLabel::UnstableNode,
            (false, false) => StabilityLabel::UnstableFocus,
        }
    }
}

impl LinearAnalysis {
    /// Analysis of an arbitrary matrix.
    pub fn from_matrix(jac: Mat2) -> Self {
        Self::with_det(jac, model::det(&jac))
    }

    fn with_det(jac: Mat2, det: f64) -> Self {
        let trace = model::trace(&jac);
        let scale = jac.iter().flatten().map(|v| v * v).sum::<f64>();
        Self {
            jac,
            trace,
            det,
            eigs: eigenvalues(trace, det),
            label: label_for(trace, det, scale),
        }
    }
}

/// Determinant at an interior equilibrium.
///
/// Along the diagonal the prey equation reduces to `-x Q(x) / (1 + lam x)`
/// with `Q` the interior quadratic, so at a root `det J = s x Q'(x) / (1 + lam x)`
/// and `Q'(x) = -sqrt(Delta)`, `0`, `+sqrt(Delta)` for E4, E3, E5. This form has
/// no cancellation near the fold, unlike the determinant of the rounded matrix.
fn interior_det(p: &Params, e: &Equilibrium) -> f64 {
    let slope = match e.kind {
        EquilibriumKind::E3 => 0.0,
        EquilibriumKind::E4 => -discriminant(p).max(0.0).sqrt(),
        EquilibriumKind::E5 => discriminant(p).max(0.0).sqrt(),
        _ => unreachable!("interior kinds only"),
    };
    p.s * e.x * slope / (1.0 + p.lam * e.y)
}

/// Linear classification of an equilibrium.
pub fn classify(p: &Params, e: &Equilibrium) -> Result<LinearAnalysis> {
    let st = e.state();
    let (fx, fy) = model::rhs(p, &st)?;
    let residual = fx.abs().max(fy.abs());
    if !(residual < EQUILIBRIUM_RESIDUAL) {
        return Err(Error::NotEquilibrium {
            x: e.x,
            y: e.y,
            residual,
        });
    }
    let jac = model::jacobian(p, &st)?;
    if e.kind.is_interior() {
        if (e.x - e.y).abs() > 1e-12 * e.x.max(1.0) {
            return Err(Error::domain(format!(
                "{} must lie on the diagonal",
                e.kind
            )));
        }
        Ok(LinearAnalysis::with_det(jac, interior_det(p, e)))
    } else {
        Ok(LinearAnalysis::from_matrix(jac))
    }
}

/// Predator growth rate at which the trace vanishes at an interior equilibrium:
/// `(-2 x^2 + (m + 1) x) / (1 + lam y)`.
pub fn trace_threshold(p: &Params, e: &Equilibrium) -> Result<f64> {
    if !e.kind.is_interior() {
        return Err(Error::domain(format!(
            "trace threshold needs an interior equilibrium, got {}",
            e.kind
        )));
    }
    Ok((-2.0 * e.x * e.x + (p.m + 1.0) * e.x) / (1.0 + p.lam * e.y))
}

fn interior(p: &Params, kind: EquilibriumKind) -> Result<Equilibrium> {
    interior_equilibria(p)?
        .into_iter()
        .find(|e| e.kind == kind)
        .ok_or(Error::MissingEquilibrium { kind })
}

/// Trace threshold at the fold point E3; requires `Delta = 0` within tolerance.
pub fn s_zero(p: &Params) -> Result<f64> {
    let e3 = interior(p, EquilibriumKind::E3)?;
    trace_threshold(p, &e3)
}

/// Trace threshold at E4; requires `Delta > 0`.
pub fn s_star(p: &Params) -> Result<f64> {
    let e4 = interior(p, EquilibriumKind::E4)?;
    trace_threshold(p, &e4)
}

/// Trace threshold at an arbitrary interior branch.
pub fn branch_threshold(p: &Params, kind: EquilibriumKind) -> Result<f64> {
    let e = interior(p, kind)?;
    trace_threshold(p, &e)
}

/// True when `|Delta|` is inside the degeneracy tolerance.
pub fn at_fold(p: &Params) -> bool {
    discriminant(p).abs() < discriminant_tolerance(p)
}
