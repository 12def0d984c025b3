//! Local polynomial expansions of the field about an interior equilibrium.

use serde::{Deserialize, Serialize};

use crate::equilibria::Equilibrium;
use crate::error::{Error, Result};
use crate::model::{self, Mat2, Params};

/// Bivariate polynomial of total degree at most 3 without constant term.
/// `c[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly3 {
    pub c: [[f64; 4]; 4],
}

fn binom(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64)
}

impl Poly3 {
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 - i {
                acc += self.c[i][j] * x.powi(i as i32) * y.powi(j as i32);
            }
        }
        acc
    }

    /// Drop every term above degree `n`.
    pub fn truncate(mut self, n: usize) -> Self {
        for i in 0..4 {
            for j in 0..4 - i {
                if i + j > n {
                    self.c[i][j] = 0.0;
                }
            }
        }
        self
    }

    fn axpy(&self, k: f64, other: &Poly3) -> Poly3 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 - i {
                out.c[i][j] += k * other.c[i][j];
            }
        }
        out
    }

    /// Substitute `x = t00 X + t01 Y`, `y = t10 X + t11 Y`.
    pub fn compose_linear(&self, t: &Mat2) -> Poly3 {
        let mut out = Poly3::default();
        for i in 0..4 {
            for j in 0..4 - i {
                let cij = self.c[i][j];
                if cij == 0.0 {
                    continue;
                }
                for k in 0..=i {
                    for l in 0..=j {
                        let w = binom(i, k)
                            * t[0][0].powi(k as i32)
                            * t[0][1].powi((i - k) as i32)
                            * binom(j, l)
                            * t[1][0].powi(l as i32)
                            * t[1][1].powi((j - l) as i32);
                        out.c[k + l][i - k + j - l] += cij * w;
                    }
                }
            }
        }
        out
    }
}

/// A planar polynomial vector field `(f, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoly {
    pub f: Poly3,
    pub g: Poly3,
}

impl PlanarPoly {
    pub fn linear(&self) -> Mat2 {
        [
            [self.f.c[1][0], self.f.c[0][1]],
            [self.g.c[1][0], self.g.c[0][1]],
        ]
    }

    /// The field in coordinates `z = T w`, i.e. `w' = T^{-1} F(T w)`.
    pub fn change_coordinates(&self, t: &Mat2) -> Result<PlanarPoly> {
        let d = model::det(t);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Degenerate("singular coordinate change".into()));
        }
        let inv = [[t[1][1] / d, -t[0][1] / d], [-t[1][0] / d, t[0][0] / d]];
        let f = self.f.compose_linear(t);
        let g = self.g.compose_linear(t);
        Ok(PlanarPoly {
            f: Poly3::default().axpy(inv[0][0], &f).axpy(inv[0][1], &g),
            g: Poly3::default().axpy(inv[1][0], &f).axpy(inv[1][1], &g),
        })
    }
}

/// Taylor coefficients of the field about an interior equilibrium,
/// `u' = sum c_ij u^i v^j` with `(u, v)` the shifted coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub at: Equilibrium,
    pub order: u32,
    pub field: PlanarPoly,
}

impl TaylorCoeffs {
    pub fn linear(&self) -> Mat2 {
        self.field.linear()
    }

    /// `(a1..a5, b1..b5)`: the `u`, `v`, `u^2`, `uv`, `v^2` coefficients of
    /// each component.
    pub fn quadratic_list(&self) -> ([f64; 5], [f64; 5]) {
        let pick = |p: &Poly3| [p.c[1][0], p.c[0][1], p.c[2][0], p.c[1][1], p.c[0][2]];
        (pick(&self.field.f), pick(&self.field.g))
    }

    /// `(m1..m9, n1..n9)`: the quadratic list followed by the `u^3`, `u^2 v`,
    /// `u v^2`, `v^3` coefficients.
    pub fn cubic_list(&self) -> ([f64; 9], [f64; 9]) {
        let pick = |p: &Poly3| {
            [
                p.c[1][0], p.c[0][1], p.c[2][0], p.c[1][1], p.c[0][2], p.c[3][0], p.c[2][1],
                p.c[1][2], p.c[0][3],
            ]
        };
        (pick(&self.field.f), pick(&self.field.g))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Expansion to order 2 or 3 about an interior equilibrium, computed from the
/// general partial derivatives of the field.
pub fn taylor_at(p: &Params, e: &Equilibrium, order: u32) -> Result<TaylorCoeffs> {
    if !e.kind.is_interior() {
        return Err(Error::domain(format!(
            "Taylor coefficients are only defined at interior equilibria, got {}",
            e.kind
        )));
    }
    if !(order == 2 || order == 3) {
        return Err(Error::domain(format!(
            "expansion order must be 2 or 3, got {order}"
        )));
    }
    let st = e.state();
    let mut field = PlanarPoly::default();
    for i in 0..4usize {
        for j in 0..4 - i {
            let deg = i + j;
            if deg == 0 || deg > order as usize {
                continue;
            }
            let (f, g) = model::partial(p, &st, i as u32, j as u32)?;
            let w = factorial(i) * factorial(j);
            field.f.c[i][j] = f / w;
            field.g.c[i][j] = g / w;
        }
    }
    Ok(TaylorCoeffs {
        at: *e,
        order,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{find_equilibrium, EquilibriumKind};
    use crate::model::State;
    use crate::stability::s_star;

    fn fold_point() -> Params {
        Params::new(0.25, 0.2, 0.5125, 0.05).unwrap()
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let mut p = Poly3::default();
        p.c[1][0] = 0.3;
        p.c[0][2] = -1.2;
        p.c[2][1] = 0.7;
        p.c[0][3] = 2.0;
        let t = [[1.5, -0.4], [0.2, 0.9]];
        let q = p.compose_linear(&t);
        for (x, y) in [(0.3, -0.2), (1.1, 0.5), (-0.7, 0.8)] {
            let (u, v) = (t[0][0] * x + t[0][1] * y, t[1][0] * x + t[1][1] * y);
            assert!((q.eval(x, y) - p.eval(u, v)).abs() < 1e-12);
        }
    }

    #[test]
    fn coordinate_change_conjugates_the_linear_part() {
        let mut field = PlanarPoly::default();
        field.f.c[1][0] = 0.1;
        field.f.c[0][1] = -2.0;
        field.g.c[1][0] = 0.5;
        field.g.c[0][1] = -0.1;
        let t = [[1.0, 0.3], [0.0, 2.0]];
        let out = field.change_coordinates(&t).unwrap();
        let l = out.linear();
        // T^{-1} A T computed by hand
        let a = field.linear();
        let at = [
            [
                a[0][0] * t[0][0] + a[0][1] * t[1][0],
                a[0][0] * t[0][1] + a[0][1] * t[1][1],
            ],
            [
                a[1][0] * t[0][0] + a[1][1] * t[1][0],
                a[1][0] * t[0][1] + a[1][1] * t[1][1],
            ],
        ];
        let d = model::det(&t);
        let inv = [[t[1][1] / d, -t[0][1] / d], [-t[1][0] / d, t[0][0] / d]];
        for r in 0..2 {
            for c in 0..2 {
                let want = inv[r][0] * at[0][c] + inv[r][1] * at[1][c];
                assert!((l[r][c] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn predator_row_at_fold() {
        let p = fold_point();
        let e3 = find_equilibrium(&p, EquilibriumKind::E3).unwrap();
        let t = taylor_at(&p, &e3, 2).unwrap();
        let (_, b) = t.quadratic_list();
        let s = p.s;
        let x3 = e3.x;
        let want = [s, -s, -s / x3, 2.0 * s / x3, -s / x3];
        for k in 0..5 {
            assert!(
                (b[k] - want[k]).abs() < 1e-12,
                "b{} = {} vs {}",
                k + 1,
                b[k],
                want[k]
            );
        }
        // finite-difference oracle on the predator component for b3
        let h = 1e-4;
        let g = |x: f64| model::rhs(&p, &State::new(x, e3.y)).unwrap().1;
        let fd = (g(x3 + h) - 2.0 * g(x3) + g(x3 - h)) / (h * h) / 2.0;
        assert!((b[2] - fd).abs() < 1e-6);
    }

    #[test]
    fn fold_identity() {
        let p = fold_point();
        let e3 = find_equilibrium(&p, EquilibriumKind::E3).unwrap();
        let (a, b) = taylor_at(&p, &e3, 2).unwrap().quadratic_list();
        assert!((a[0] + a[1]).abs() < 1e-12);
        assert!((b[1] + b[0]).abs() < 1e-15);
    }

    #[test]
    fn trace_identity_at_threshold() {
        let p = Params::new(0.25, 0.2, 0.3, 0.1).unwrap();
        let q = p.with_s(s_star(&p).unwrap());
        let e4 = find_equilibrium(&q, EquilibriumKind::E4).unwrap();
        let (m, n) = taylor_at(&q, &e4, 3).unwrap().cubic_list();
        assert!((m[0] + n[1]).abs() < 1e-15);
    }

    #[test]
    fn cubic_coefficients_match_differences() {
        let p = Params::new(0.25, 0.2, 0.3, 0.16).unwrap();
        let e = find_equilibrium(&p, EquilibriumKind::E5).unwrap();
        let t = taylor_at(&p, &e, 3).unwrap();
        // third differences on each component along x, y
        let h = 1e-3;
        let f = |x: f64, y: f64| model::rhs(&p, &State::new(x, y)).unwrap();
        let third = |dir: (f64, f64)| {
            let at = |k: f64| f(e.x + k * h * dir.0, e.y + k * h * dir.1);
            let (a, b, c, d) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
            (
                (a.0 - 2.0 * b.0 + 2.0 * c.0 - d.0) / (2.0 * h * h * h),
                (a.1 - 2.0 * b.1 + 2.0 * c.1 - d.1) / (2.0 * h * h * h),
            )
        };
        let (fx, gx) = third((1.0, 0.0));
        let (fy, gy) = third((0.0, 1.0));
        assert!((6.0 * t.field.f.c[3][0] - fx).abs() < 1e-4);
        assert!((6.0 * t.field.g.c[3][0] - gx).abs() < 1e-4);
        assert!((6.0 * t.field.f.c[0][3] - fy).abs() < 1e-4);
        assert!((6.0 * t.field.g.c[0][3] - gy).abs() < 1e-4);
    }

    #[test]
    fn rejects_boundary_and_bad_order() {
        let p = Params::new(0.25, 0.2, 0.3, 0.1).unwrap();
        let [e1, _] = crate::equilibria::boundary_equilibria(&p);
        assert!(taylor_at(&p, &e1, 2).is_err());
        let e4 = find_equilibrium(&p, EquilibriumKind::E4).unwrap();
        assert!(taylor_at(&p, &e4, 4).is_err());
        let t2 = taylor_at(&p, &e4, 2).unwrap();
        assert_eq!(t2.field.f.c[3][0], 0.0);
    }
}
