//! Dormand–Prince 5(4) tableau, single steps and Hermite interpolation.

use crate::model::{self, Params};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) type V2 = [f64; 2];

#[inline]
fn f(p: &Params, y: V2) -> V2 {
    let (a, b) = model::field(p, y[0], y[1]);
    [a, b]
}

#[inline]
fn comb(y: V2, h: f64, terms: &[(f64, V2)]) -> V2 {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

pub(crate) struct Step {
    pub y: V2,
    /// Derivative at the new point (first stage of the next step).
    pub f: V2,
    pub err: V2,
}

/// One step from `y` with derivative `k1 = f(y)`. Returns `None` when an
/// intermediate stage leaves `x > 0`, where the field is undefined.
pub(crate) fn step(p: &Params, y: V2, k1: V2, h: f64) -> Option<Step> {
    let guard = |z: V2| (z[0] > 0.0 && z[0].is_finite() && z[1].is_finite()).then_some(z);
    let k2 = f(p, guard(comb(y, h, &[(A21, k1)]))?);
    let k3 = f(p, guard(comb(y, h, &[(A31, k1), (A32, k2)]))?);
    let k4 = f(p, guard(comb(y, h, &[(A41, k1), (A42, k2), (A43, k3)]))?);
    let k5 = f(
        p,
        guard(comb(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]))?,
    );
    let k6 = f(
        p,
        guard(comb(
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        ))?,
    );
    let ynew = guard(comb(
        y,
        h,
        &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
    ))?;
    let k7 = f(p, ynew);
    let mut err = [0.0; 2];
    for i in 0..2 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Some(Step {
        y: ynew,
        f: k7,
        err,
    })
}

/// Scaled max-norm of the error estimate.
pub(crate) fn error_norm(err: V2, y0: V2, y1: V2, rtol: f64, atol: f64) -> f64 {
    (0..2)
        .map(|i| err[i].abs() / (atol + rtol * y0[i].abs().max(y1[i].abs())))
        .fold(0.0, f64::max)
}

/// Cubic Hermite interpolant on `[t0, t0 + h]` at `theta in [0, 1]`.
pub(crate) fn hermite(y0: V2, f0: V2, y1: V2, f1: V2, h: f64, theta: f64) -> V2 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    [
        h00 * y0[0] + h10 * h * f0[0] + h01 * y1[0] + h11 * h * f1[0],
        h00 * y0[1] + h10 * h * f0[1] + h01 * y1[1] + h11 * h * f1[1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    const C2: f64 = 1.0 / 5.0;
    const C3: f64 = 3.0 / 10.0;
    const C4: f64 = 4.0 / 5.0;
    const C5: f64 = 8.0 / 9.0;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        assert!((A21 - C2).abs() < 1e-16);
        assert!((A31 + A32 - C3).abs() < 1e-16);
        assert!((A41 + A42 + A43 - C4).abs() < 1e-15);
        assert!((A51 + A52 + A53 + A54 - C5).abs() < 1e-14);
        assert!((A61 + A62 + A63 + A64 + A65 - 1.0).abs() < 1e-14);
        assert!((A71 + A73 + A74 + A75 + A76 - 1.0).abs() < 1e-15);
        assert!((E1 + E3 + E4 + E5 + E6 + E7).abs() < 1e-16);
    }

    #[test]
    fn hermite_reproduces_endpoints() {
        let (y0, f0, y1, f1) = ([1.0, 2.0], [0.5, -1.0], [1.3, 1.9], [0.1, 0.2]);
        assert_eq!(hermite(y0, f0, y1, f1, 0.4, 0.0), y0);
        let end = hermite(y0, f0, y1, f1, 0.4, 1.0);
        assert!((end[0] - y1[0]).abs() < 1e-15 && (end[1] - y1[1]).abs() < 1e-15);
    }

    #[test]
    fn rejects_stage_outside_domain() {
        let p = Params::new(0.25, 0.2, 0.3, 0.1).unwrap();
        let y = [1e-3, 0.0];
        let k1 = f(&p, y);
        assert!(step(&p, y, k1, 1e4).is_none());
        assert!(step(&p, y, k1, 1e-3).is_some());
    }
}
