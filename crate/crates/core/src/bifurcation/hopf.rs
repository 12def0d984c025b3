//! Hopf detection on an interior branch and the first Lyapunov coefficient.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::taylor::{taylor_at, PlanarPoly};
use crate::equilibria::{find_equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model::{self, Params};
use crate::stability::{branch_threshold, classify, StabilityLabel};

/// `|l1|` below this is reported as [`HopfDirection::Undetermined`].
pub const L1_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopfDirection {
    Supercritical,
    Subcritical,
    Undetermined,
}

impl HopfDirection {
    pub fn from_l1(l1: f64) -> Self {
        if l1 < -L1_TOL {
            Self::Supercritical
        } else if l1 > L1_TOL {
            Self::Subcritical
        } else {
            Self::Undetermined
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Supercritical => "supercritical",
            Self::Subcritical => "subcritical",
            Self::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub l1: f64,
    pub direction: HopfDirection,
    pub omega: f64,
    /// Cubic normal-form coefficient from the rotated-coordinates route.
    pub rotated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    pub kind: EquilibriumKind,
    /// Predator rate at which the trace vanishes on this branch.
    pub s_star: f64,
    /// `d mu / d s`, exactly -1 since the branch does not move with `s`.
    pub mu_prime: f64,
    /// Determinant of the Jacobian at `s_star`.
    pub det: f64,
    pub label: StabilityLabel,
    /// `sqrt(det)` when the eigenvalues are purely imaginary.
    pub omega: Option<f64>,
    pub l1: Option<f64>,
    pub direction: Option<HopfDirection>,
}

impl HopfReport {
    pub fn is_weak_center(&self) -> bool {
        self.omega.is_some()
    }
}

/// `mu(s) = tr J(E)` on an interior branch, evaluated from the raw Jacobian.
pub fn mu(p: &Params, kind: EquilibriumKind, s: f64) -> Result<f64> {
    let q = p.with_s(s);
    let e = find_equilibrium(&q, kind)?;
    Ok(model::trace(&model::jacobian(&q, &e.state())?))
}

/// Hopf data on the E4 branch, without the Lyapunov coefficient.
pub fn hopf_detect(p: &Params) -> Result<HopfReport> {
    hopf_detect_at(p, EquilibriumKind::E4)
}

/// Hopf data on an interior branch. The `s` component of `p` is ignored.
pub fn hopf_detect_at(p: &Params, kind: EquilibriumKind) -> Result<HopfReport> {
    if !matches!(kind, EquilibriumKind::E4 | EquilibriumKind::E5) {
        return Err(Error::domain(format!(
            "Hopf detection runs on E4 or E5, not {kind}"
        )));
    }
    let s_star = branch_threshold(p, kind)?;
    if !(s_star > 0.0) {
        return Err(Error::domain(format!(
            "the trace of J({kind}) does not vanish for any s > 0 (threshold {s_star})"
        )));
    }
    let q = p.with_s(s_star);
    let e = find_equilibrium(&q, kind)?;
    let la = classify(&q, &e)?;
    let omega = (la.det > 0.0).then(|| la.det.sqrt());
    Ok(HopfReport {
        kind,
        s_star,
        mu_prime: -1.0,
        det: la.det,
        label: la.label,
        omega,
        l1: None,
        direction: None,
    })
}

/// Hopf data including `l1` when the branch has a weak center.
pub fn hopf_analysis(p: &Params, kind: EquilibriumKind) -> Result<HopfReport> {
    let mut r = hopf_detect_at(p, kind)?;
    if r.is_weak_center() {
        let ly = first_lyapunov_at(p, kind)?;
        r.l1 = Some(ly.l1);
        r.direction = Some(ly.direction);
    }
    Ok(r)
}

/// First Lyapunov coefficient at E4 with `s = s*`.
pub fn first_lyapunov(p: &Params) -> Result<LyapunovResult> {
    first_lyapunov_at(p, EquilibriumKind::E4)
}

/// First Lyapunov coefficient on an interior branch at its trace threshold.
/// The `s` component of `p` is replaced by the threshold.
pub fn first_lyapunov_at(p: &Params, kind: EquilibriumKind) -> Result<LyapunovResult> {
    let r = hopf_detect_at(p, kind)?;
    if !r.is_weak_center() {
        return Err(Error::Degenerate(format!(
            "{kind} is not a weak center at s = {}: det J = {:e} ({})",
            r.s_star,
            r.det,
            r.label.as_str()
        )));
    }
    let q = p.with_s(r.s_star);
    let e = find_equilibrium(&q, kind)?;
    let tc = taylor_at(&q, &e, 3)?;
    let l1 = planar_lyapunov(&tc.field)?;
    let (rotated, omega) = rotated_coefficient(&tc.field)?;
    Ok(LyapunovResult {
        l1,
        direction: HopfDirection::from_l1(l1),
        omega,
        rotated,
    })
}

struct Linear {
    a: f64,
    b: f64,
    c: f64,
    delta: f64,
}

fn trace_free_linear(f: &PlanarPoly) -> Result<Linear> {
    let j = f.linear();
    let tr = model::trace(&j);
    let scale = j.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if tr.abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::domain(format!(
            "linear part has nonzero trace {tr:e}"
        )));
    }
    let a = 0.5 * (j[0][0] - j[1][1]);
    let (b, c) = (j[0][1], j[1][0]);
    let delta = -a * a - b * c;
    if !(delta > 0.0) {
        return Err(Error::Degenerate(format!("no rotation: det = {delta:e}")));
    }
    if b == 0.0 || c == 0.0 {
        return Err(Error::Degenerate(
            "off-diagonal linear coefficient vanishes".into(),
        ));
    }
    Ok(Linear { a, b, c, delta })
}

/// Lyapunov number of `x' = a x + b y + F(x, y)`, `y' = c x - a y + G(x, y)`
/// for a general trace-free linear part with `Delta = -a^2 - bc > 0`.
/// Negative values mean a stable weak focus.
pub fn planar_lyapunov(f: &PlanarPoly) -> Result<f64> {
    let Linear { a, b, c, delta } = trace_free_linear(f)?;
    let (p, q) = (&f.f.c, &f.g.c);
    let (a20, a11, a02) = (p[2][0], p[1][1], p[0][2]);
    let (a30, a21, a12) = (p[3][0], p[2][1], p[1][2]);
    let (b20, b11, b02) = (q[2][0], q[1][1], q[0][2]);
    let (b21, b12, b03) = (q[2][1], q[1][2], q[0][3]);

    let quadratic = a * c * (a11 * a11 + a11 * b02 + a02 * b11)
        + a * b * (b11 * b11 + a20 * b11 + a11 * b20)
        + c * c * (a11 * a02 + 2.0 * a02 * b02)
        - 2.0 * a * c * (b02 * b02 - a20 * a02)
        - 2.0 * a * b * (a20 * a20 - b20 * b02)
        - b * b * (2.0 * a20 * b20 + b11 * b20)
        + (b * c - 2.0 * a * a) * (b11 * b02 - a11 * a20);
    let cubic =
        (a * a + b * c) * (3.0 * (c * b03 - b * a30) + 2.0 * a * (a21 + b12) + (c * a12 - b * b21));
    Ok(-3.0 * PI / (2.0 * b * delta.powf(1.5)) * (quadratic - cubic))
}

/// Cubic normal-form coefficient `a` of `r' = a r^3` after moving the linear
/// part to `[[0, -w], [w, 0]]`. Returns `(a, w)`.
pub fn rotated_coefficient(f: &PlanarPoly) -> Result<(f64, f64)> {
    let Linear { a, c, delta, .. } = trace_free_linear(f)?;
    let omega = delta.sqrt();
    let t = [[1.0, a / omega], [0.0, c / omega]];
    let r = f.change_coordinates(&t)?;
    let (p, q) = (&r.f.c, &r.g.c);
    let (fxx, fxy, fyy) = (2.0 * p[2][0], p[1][1], 2.0 * p[0][2]);
    let (gxx, gxy, gyy) = (2.0 * q[2][0], q[1][1], 2.0 * q[0][2]);
    let (fxxx, fxyy) = (6.0 * p[3][0], 2.0 * p[1][2]);
    let (gxxy, gyyy) = (2.0 * q[2][1], 6.0 * q[0][3]);
    let third = fxxx + fxyy + gxxy + gyyy;
    let second = fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy;
    Ok(((third + second / omega) / 16.0, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifurcation::taylor::Poly3;
    use rand::{Rng, SeedableRng};

    fn fixture() -> Params {
        Params::new(0.25, 0.2, 0.3, 0.1).unwrap()
    }

    fn random_field(rng: &mut impl Rng) -> Option<PlanarPoly> {
        let mut f = PlanarPoly::default();
        for i in 0..4 {
            for j in 0..4 - i {
                if i + j >= 2 {
                    f.f.c[i][j] = rng.gen_range(-1.0..1.0);
                    f.g.c[i][j] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if -a * a - b * c < 0.05 {
            return None;
        }
        f.f.c[1][0] = a;
        f.f.c[0][1] = b;
        f.g.c[1][0] = c;
        f.g.c[0][1] = -a;
        Some(f)
    }

    #[test]
    fn canonical_focus() {
        // x' = -y + x r^2, y' = x + y r^2: unstable weak focus
        let mut f = PlanarPoly {
            f: Poly3::default(),
            g: Poly3::default(),
        };
        f.f.c[0][1] = -1.0;
        f.g.c[1][0] = 1.0;
        f.f.c[3][0] = 1.0;
        f.f.c[1][2] = 1.0;
        f.g.c[2][1] = 1.0;
        f.g.c[0][3] = 1.0;
        let (a, w) = rotated_coefficient(&f).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (w - 1.0).abs() < 1e-14);
        assert!((planar_lyapunov(&f).unwrap() - 12.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn general_formula_matches_rotated_route() {
        // l1 = 12 pi sqrt(Delta) a / (-bc) for any trace-free linear part
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut n = 0;
        while n < 500 {
            let Some(f) = random_field(&mut rng) else {
                continue;
            };
            n += 1;
            let l1 = planar_lyapunov(&f).unwrap();
            let (a, w) = rotated_coefficient(&f).unwrap();
            let j = f.linear();
            let want = 12.0 * PI * w * a / (-j[0][1] * j[1][0]);
            assert!(
                (l1 - want).abs() < 1e-9 * want.abs().max(1.0),
                "{l1} vs {want}"
            );
        }
    }

    #[test]
    fn time_scaling_keeps_direction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut n = 0;
        while n < 50 {
            let Some(f) = random_field(&mut rng) else {
                continue;
            };
            n += 1;
            let mut g = f;
            for i in 0..4 {
                for j in 0..4 - i {
                    g.f.c[i][j] *= 3.7;
                    g.g.c[i][j] *= 3.7;
                }
            }
            let (u, v) = (planar_lyapunov(&f).unwrap(), planar_lyapunov(&g).unwrap());
            assert_eq!(u.signum(), v.signum());
            assert!(v / u > 0.0);
        }
    }

    #[test]
    fn detect_on_e4_fixture() {
        let r = hopf_detect(&fixture()).unwrap();
        assert!((r.s_star - 0.161405).abs() < 1e-6);
        assert_eq!(r.mu_prime, -1.0);
        assert!(r.det < 0.0);
        assert_eq!(r.label, StabilityLabel::Saddle);
        assert!(!r.is_weak_center());
        assert!(matches!(
            first_lyapunov(&fixture()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn mu_is_linear_in_s() {
        let p = fixture();
        let st = hopf_detect(&p).unwrap().s_star;
        let k = EquilibriumKind::E4;
        assert!(mu(&p, k, st).unwrap().abs() < 1e-12);
        let h = 1e-3;
        let slope = (mu(&p, k, st + h).unwrap() - mu(&p, k, st - h).unwrap()) / (2.0 * h);
        assert!((slope + 1.0).abs() < 1e-10);
    }

    #[test]
    fn e5_fixture_is_subcritical() {
        let p = fixture();
        let r = hopf_analysis(&p, EquilibriumKind::E5).unwrap();
        assert!((r.s_star - 0.03267504803563758).abs() < 1e-12);
        assert_eq!(r.label, StabilityLabel::WeakCenter);
        let ly = first_lyapunov_at(&p, EquilibriumKind::E5).unwrap();
        assert_eq!(ly.direction, HopfDirection::Subcritical);
        assert!(ly.rotated > 0.0);
        assert!((ly.omega - r.omega.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn e5_supercritical_example() {
        let p = Params::new(0.2, 0.16807, 1.18209, 0.1).unwrap();
        let ly = first_lyapunov_at(&p, EquilibriumKind::E5).unwrap();
        assert_eq!(ly.direction, HopfDirection::Supercritical);
    }

    #[test]
    fn direction_thresholds() {
        assert_eq!(HopfDirection::from_l1(-1e-7), HopfDirection::Supercritical);
        assert_eq!(HopfDirection::from_l1(1e-7), HopfDirection::Subcritical);
        assert_eq!(HopfDirection::from_l1(5e-9), HopfDirection::Undetermined);
    }
}
