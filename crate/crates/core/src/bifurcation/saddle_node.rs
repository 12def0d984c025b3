//! The fold at `Delta = 0`: Sotomayor conditions, the saddle-node type for
//! `s != s0`, and the cusp test at `s = s0`.

use serde::{Deserialize, Serialize};

use super::taylor::taylor_at;
use crate::equilibria::{interior_equilibria, Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model::{self, Mat2, Params};
use crate::stability::{at_fold, classify, trace_threshold};

/// Nondegeneracy cutoff, relative to the largest Jacobian entry (at least 1).
pub const NONDEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SotomayorCheck {
    pub e3: Equilibrium,
    /// Right null vector, scaled so that `v[0] = 1`.
    pub v: [f64; 2],
    /// Left null vector with unit max-norm and `w[0] > 0`.
    pub w: [f64; 2],
    pub f_lam: [f64; 2],
    pub f_a: [f64; 2],
    pub d2f_vv: [f64; 2],
    /// `w . F_lam`
    pub t1: f64,
    /// `w . D^2F(v, v)`
    pub t2: f64,
    /// `w . F_a`
    pub t1_a: f64,
    /// Factor taking `w` to the normalization whose first entry is `s`.
    pub w_to_first_entry_s: f64,
    /// `|J v|` and `|J^T w|`.
    pub residuals: [f64; 2],
    pub passes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SaddleNodeType {
    AttractingSaddleNode,
    RepellingSaddleNode,
}

impl SaddleNodeType {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AttractingSaddleNode => "attracting_saddle_node",
            Self::RepellingSaddleNode => "repelling_saddle_node",
        }
    }
}

/// Center-manifold reduction at the fold for `s != s0`.
///
/// In eigen-coordinates `T = [[a2, a1], [-a1, b1]]` the linear part is
/// `diag(0, s0 - s)`. After the time change `dt = (s0 - s) d tau` the center
/// equation reads `X' = c1 X^2 + ...` and the transverse one `Y' = d1 Y + ...`
/// with `d1 = (s0 - s)^2 > 0`, so in `tau` the node part always repels and the
/// sign of `s0 - s` decides the type in the original time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleNodeReport {
    pub kind: SaddleNodeType,
    pub s0: f64,
    pub time_rescale: f64,
    pub c1: f64,
    pub d1: f64,
    /// `s0 s (a3 + a4 + a5)`, the simplified closed form of `c1`.
    pub c1_closed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CuspVerdict {
    CuspCodim2,
    Degenerate,
}

impl CuspVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CuspCodim2 => "cusp_codim2",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    pub verdict: CuspVerdict,
    pub s0: f64,
    /// Linear part after the transformation; should be `[[0, 1], [0, 0]]`.
    pub linear: Mat2,
    pub e: [f64; 3],
    pub f: [f64; 3],
    pub f1_closed: f64,
    pub f2_plus_2e1: f64,
    pub f2_plus_2e1_closed: f64,
    /// Moduli of the eigenvalues of `J(E3)`.
    pub eig_abs: [f64; 2],
}

fn fold_point(p: &Params) -> Result<(Equilibrium, f64)> {
    if !at_fold(p) {
        return Err(Error::domain(format!(
            "the fold analysis needs Delta = 0 (got Delta = {:e})",
            crate::equilibria::discriminant(p)
        )));
    }
    let e3 = interior_equilibria(p)?
        .into_iter()
        .find(|e| e.kind == EquilibriumKind::E3)
        .ok_or(Error::MissingEquilibrium {
            kind: EquilibriumKind::E3,
        })?;
    let s0 = trace_threshold(p, &e3)?;
    Ok((e3, s0))
}

fn s_tolerance(s0: f64) -> f64 {
    1e-9 * s0.abs().max(1.0)
}

fn off_cusp(p: &Params) -> Result<(Equilibrium, f64)> {
    let (e3, s0) = fold_point(p)?;
    if (p.s - s0).abs() <= s_tolerance(s0) {
        return Err(Error::domain(format!(
            "s = {} coincides with s0 = {s0}; use the cusp test",
            p.s
        )));
    }
    Ok((e3, s0))
}

fn pick_larger(u: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    let n = |z: [f64; 2]| z[0].abs().max(z[1].abs());
    if n(u) >= n(v) {
        u
    } else {
        v
    }
}

fn jac_scale(j: &Mat2) -> f64 {
    j.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()))
}

/// Sotomayor's saddle-node conditions at E3 with `lam` as the parameter.
pub fn sotomayor_saddle_node(p: &Params) -> Result<SotomayorCheck> {
    let (e3, _) = off_cusp(p)?;
    let st = e3.state();
    let j = model::jacobian(p, &st)?;

    let mut v = pick_larger([-j[0][1], j[0][0]], [j[1][1], -j[1][0]]);
    if v[0].abs() > 1e-12 * v[1].abs() {
        v = [1.0, v[1] / v[0]];
    }
    let mut w = pick_larger([j[1][0], -j[0][0]], [j[1][1], -j[0][1]]);
    let wn = w[0].abs().max(w[1].abs());
    let sign = if w[0] < 0.0 { -1.0 } else { 1.0 };
    w = [sign * w[0] / wn, sign * w[1] / wn];

    let residuals = [
        (j[0][0] * v[0] + j[0][1] * v[1]).hypot(j[1][0] * v[0] + j[1][1] * v[1]),
        (j[0][0] * w[0] + j[1][0] * w[1]).hypot(j[0][1] * w[0] + j[1][1] * w[1]),
    ];

    let (fl1, fl2) = model::d_dlam(p, &st)?;
    let (fa1, fa2) = model::d_da(p, &st)?;
    let (xx1, xx2) = model::partial(p, &st, 2, 0)?;
    let (xy1, xy2) = model::partial(p, &st, 1, 1)?;
    let (yy1, yy2) = model::partial(p, &st, 0, 2)?;
    let quad = |fxx: f64, fxy: f64, fyy: f64| {
        fxx * v[0] * v[0] + 2.0 * fxy * v[0] * v[1] + fyy * v[1] * v[1]
    };
    let d2f_vv = [quad(xx1, xy1, yy1), quad(xx2, xy2, yy2)];
    let dot = |a: [f64; 2]| w[0] * a[0] + w[1] * a[1];
    let t1 = dot([fl1, fl2]);
    let t2 = dot(d2f_vv);
    let tol = NONDEGENERACY_TOL * jac_scale(&j);
    Ok(SotomayorCheck {
        e3,
        v,
        w,
        f_lam: [fl1, fl2],
        f_a: [fa1, fa2],
        d2f_vv,
        t1,
        t2,
        t1_a: dot([fa1, fa2]),
        w_to_first_entry_s: if w[0] != 0.0 { p.s / w[0] } else { f64::NAN },
        residuals,
        passes: t1.abs() > tol && t2.abs() > tol,
    })
}

/// Saddle-node type at E3 for `s != s0`.
pub fn saddle_node_type(p: &Params) -> Result<SaddleNodeReport> {
    let (e3, s0) = off_cusp(p)?;
    let tc = taylor_at(p, &e3, 2)?;
    let (a, b) = tc.quadratic_list();
    let t = [[a[1], a[0]], [-a[0], b[0]]];
    let moved = tc.field.change_coordinates(&t)?;
    let time_rescale = s0 - p.s;
    let c1 = time_rescale * moved.f.c[2][0];
    let scale = a[2].abs() + a[3].abs() + a[4].abs();
    if c1.abs() <= NONDEGENERACY_TOL * s0.abs() * p.s * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Degenerate(
            "quadratic center-manifold coefficient vanishes".into(),
        ));
    }
    let kind = if time_rescale > 0.0 {
        SaddleNodeType::RepellingSaddleNode
    } else {
        SaddleNodeType::AttractingSaddleNode
    };
    Ok(SaddleNodeReport {
        kind,
        s0,
        time_rescale,
        c1,
        d1: time_rescale * time_rescale,
        c1_closed: s0 * p.s * (a[2] + a[3] + a[4]),
    })
}

/// Codimension-two test at `(lam_SN, s0)`.
pub fn cusp_check(p: &Params) -> Result<CuspReport> {
    let (e3, s0) = fold_point(p)?;
    if (p.s - s0).abs() > s_tolerance(s0) {
        return Err(Error::domain(format!(
            "the cusp test needs s = s0 = {s0}, got {}",
            p.s
        )));
    }
    // evaluate exactly on the codimension-two point
    let q = p.with_s(s0);
    let tc = taylor_at(&q, &e3, 2)?;
    let (a, b) = tc.quadratic_list();
    let t = [[a[1], 0.0], [-a[0], 1.0]];
    let moved = tc.field.change_coordinates(&t)?;
    let e = [moved.f.c[2][0], moved.f.c[1][1], moved.f.c[0][2]];
    let f = [moved.g.c[2][0], moved.g.c[1][1], moved.g.c[0][2]];
    let la = classify(&q, &e3)?;
    let f2_plus_2e1 = f[1] + 2.0 * e[0];
    let tol1 = NONDEGENERACY_TOL * b[0] * b[0] * (a[2].abs() + a[3].abs() + a[4].abs());
    let tol2 = NONDEGENERACY_TOL * b[0].abs() * (2.0 * a[2].abs() + a[3].abs());
    let verdict = if f[0].abs() > tol1 && f2_plus_2e1.abs() > tol2 {
        CuspVerdict::CuspCodim2
    } else {
        CuspVerdict::Degenerate
    };
    Ok(CuspReport {
        verdict,
        s0,
        linear: moved.linear(),
        e,
        f,
        f1_closed: -b[0] * b[0] * (a[2] + a[3] + a[4]),
        f2_plus_2e1,
        f2_plus_2e1_closed: -b[0] * (2.0 * a[2] + a[3]),
        eig_abs: [la.eigs[0].norm(), la.eigs[1].norm()],
    })
}
