//! Directional blow-up of the origin.
//!
//! The field is singular at `x = 0`, so the origin is resolved in two charts:
//!
//! * the prey chart `x = u`, `y = u v`, covering directions with finite slope
//!   `v = y / x`; the exceptional divisor is `u = 0`;
//! * the predator chart `y = w`, `x = w z`, covering the vertical direction
//!   `z = x / y = 0`. Its field carries a `1 / z` pole, removed by multiplying
//!   with `z` (a positive time rescaling on `z > 0`).
//!
//! Every divisor singularity has a lower-triangular Jacobian: the diagonal
//! gives a radial eigenvalue (transverse to the divisor, along `u` or `w`)
//! and a tangential one (along the divisor).

use serde::{Deserialize, Serialize};

use super::{LinearAnalysis, StabilityLabel};
use crate::error::Result;
use crate::model::{Mat2, Params};

/// Prey-chart field.
pub fn blowup_field(p: &Params, u: f64, v: f64) -> (f64, f64) {
    let g = prey_growth(p, u, v);
    let du = u * g;
    let dv = v * (p.s * (1.0 - v) - g);
    (du, dv)
}

/// `(1 - u)(u - m) / (1 + lam u v) - a u v`, the per-capita prey rate.
fn prey_growth(p: &Params, u: f64, v: f64) -> f64 {
    (1.0 - u) * (u - p.m) / (1.0 + p.lam * u * v) - p.a * u * v
}

/// Analytic Jacobian of [`blowup_field`].
pub fn blowup_jacobian(p: &Params, u: f64, v: f64) -> Mat2 {
    let den = 1.0 + p.lam * u * v;
    let poly = (1.0 - u) * (u - p.m);
    let g = poly / den - p.a * u * v;
    let g_u = ((1.0 + p.m) - 2.0 * u) / den - poly * p.lam * v / (den * den) - p.a * v;
    let g_v = -poly * p.lam * u / (den * den) - p.a * u;
    let h = p.s * (1.0 - v) - g;
    [[g + u * g_u, u * g_v], [-v * g_u, h + v * (-p.s - g_v)]]
}

/// Predator-chart field, already multiplied by `z`.
pub fn far_chart_field(p: &Params, w: f64, z: f64) -> (f64, f64) {
    let dw = p.s * w * (z - 1.0);
    let dz = z * far_rate(p, w, z);
    (dw, dz)
}

fn far_rate(p: &Params, w: f64, z: f64) -> f64 {
    let r = (1.0 - w * z) * (w * z - p.m);
    z * r / (1.0 + p.lam * w) - p.a * w * z - p.s * (z - 1.0)
}

/// Analytic Jacobian of [`far_chart_field`].
pub fn far_chart_jacobian(p: &Params, w: f64, z: f64) -> Mat2 {
    let den = 1.0 + p.lam * w;
    let r = (1.0 - w * z) * (w * z - p.m);
    let r_w = z * (1.0 + p.m - 2.0 * w * z);
    let r_z = w * (1.0 + p.m - 2.0 * w * z);
    let k = z * r / den - p.a * w * z - p.s * (z - 1.0);
    let k_w = z * r_w / den - z * r * p.lam / (den * den) - p.a * z;
    let k_z = r / den + z * r_z / den - p.a * w - p.s;
    [[p.s * (z - 1.0), p.s * w], [z * k_w, k + z * k_z]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginVerdict {
    Unstable,
    Attracting,
    SectorMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorSingularity {
    /// Slope `y / x` of the direction; infinite for the vertical direction.
    pub v: f64,
    /// Jacobian in the chart that contains the point.
    pub jacobian: Mat2,
    pub radial: f64,
    pub tangential: f64,
    pub label: StabilityLabel,
    pub hyperbolic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    /// Singularities of the prey chart on `u = 0`, by increasing `v`.
    pub singularities: Vec<DivisorSingularity>,
    /// The vertical direction `z = 0` of the predator chart.
    pub vertical: DivisorSingularity,
    pub origin_verdict: OriginVerdict,
    /// Whether the verdict is "unstable", as claimed in the published analysis.
    pub paper_agrees: bool,
    /// Human-readable notes on non-hyperbolic points, if any.
    pub flags: Vec<String>,
}

fn singularity(v: f64, jacobian: Mat2) -> DivisorSingularity {
    let radial = jacobian[0][0];
    let tangential = jacobian[1][1];
    let la = LinearAnalysis::from_matrix(jacobian);
    DivisorSingularity {
        v,
        jacobian,
        radial,
        tangential,
        label: la.label,
        hyperbolic: radial != 0.0 && tangential != 0.0,
    }
}

/// Roots of `f` on `(lo, hi]` located by sign changes on a uniform grid and
/// refined by bisection.
fn grid_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / n as f64;
    let mut a = lo + 1e-3 * step;
    let mut fa = f(a);
    for i in 1..=n {
        let b = lo + i as f64 * step;
        let fb = f(b);
        if fb == 0.0 {
            roots.push(b);
        } else if fa * fb < 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (l + r);
                let fm = f(mid);
                if fm == 0.0 || (r - l) < 1e-17 * mid.abs().max(1.0) {
                    l = mid;
                    r = mid;
                    break;
                }
                if fl * fm < 0.0 {
                    r = mid;
                } else {
                    l = mid;
                    fl = fm;
                }
            }
            roots.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Resolves the origin and derives its local behavior from the divisor
/// singularities.
pub fn origin_blowup(p: &Params) -> Result<BlowupReport> {
    p.validate()?;

    // Nonzero slopes: the divisor flow divided by its factor v in the prey
    // chart (v in (0, 1]) and by z in the predator chart (v >= 1).
    let reduced_prey = |v: f64| blowup_field(p, 0.0, v).1 / v;
    let reduced_far = |z: f64| far_chart_field(p, 0.0, z).1 / z;
    let mut slopes: Vec<f64> = grid_roots(reduced_prey, 0.0, 1.0, 256);
    for z in grid_roots(reduced_far, 0.0, 1.0, 256) {
        let v = 1.0 / z;
        if !slopes.iter().any(|s| (s - v).abs() < 1e-9 * v.max(1.0)) {
            slopes.push(polish(&reduced_prey, v));
        }
    }
    slopes.sort_by(f64::total_cmp);

    let mut singularities = vec![singularity(0.0, blowup_jacobian(p, 0.0, 0.0))];
    singularities.extend(
        slopes
            .into_iter()
            .map(|v| singularity(v, blowup_jacobian(p, 0.0, v))),
    );
    let vertical = singularity(f64::INFINITY, far_chart_jacobian(p, 0.0, 0.0));

    let mut flags = Vec::new();
    for s in singularities.iter().chain(std::iter::once(&vertical)) {
        if !s.hyperbolic {
            flags.push(format!(
                "non-hyperbolic divisor singularity at slope {}",
                s.v
            ));
        }
    }

    let all = || singularities.iter().chain(std::iter::once(&vertical));
    let origin_verdict = if all().all(|s| s.radial < 0.0) {
        OriginVerdict::Attracting
    } else if all().all(|s| s.radial > 0.0) {
        OriginVerdict::Unstable
    } else {
        OriginVerdict::SectorMixed
    };

    Ok(BlowupReport {
        singularities,
        vertical,
        origin_verdict,
        paper_agrees: origin_verdict == OriginVerdict::Unstable,
        flags,
    })
}

/// Newton refinement with a central-difference slope.
fn polish(f: &impl Fn(f64) -> f64, mut v: f64) -> f64 {
    for _ in 0..20 {
        let h = 1e-7 * v.abs().max(1.0);
        let d = (f(v + h) - f(v - h)) / (2.0 * h);
        if d == 0.0 {
            break;
        }
        let step = f(v) / d;
        v -= step;
        if step.abs() < 1e-15 * v.abs().max(1.0) {
            break;
        }
    }
    v
}
