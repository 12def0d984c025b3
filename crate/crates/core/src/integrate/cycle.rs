//! Long-run behavior and limit cycles via returns to the section
//! `{y = x, x increasing}`.

use serde::{Deserialize, Serialize};

use super::{check_start, dopri, Accepted, Driver, Event, IntegratorConfig};
use crate::equilibria::{equilibria, interior_equilibria, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model::{self, Params, State};

/// Distance below which the trajectory counts as converged to an equilibrium.
pub const EQUILIBRIUM_CAPTURE: f64 = 1e-8;
const POSITION_RTOL: f64 = 1e-6;
const PERIOD_RTOL: f64 = 1e-5;
// return-map drift must also be small against the oscillation itself, or a
// slowly decaying focus would pass the position test
const DRIFT_PER_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub period: f64,
    /// `max |x - mean(x)|` over the last period.
    pub amplitude: f64,
    pub mean_x: f64,
    pub section_point: State,
    /// Section returns observed after the transient.
    pub returns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LongRun {
    Cycle(Cycle),
    Equilibrium { kind: EquilibriumKind, t: f64 },
    DomainExit { t: f64 },
}

fn section(y: [f64; 2]) -> f64 {
    y[1] - y[0]
}

/// Time in `(t0, t1]` where the step crosses the section from above.
fn crossing_time(p: &Params, a: &Accepted) -> f64 {
    let (mut lo, mut hi) = (a.t0, a.t1);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if section(a.at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // polish with exact sub-steps from the step start
    let mut tau = 0.5 * (lo + hi) - a.t0;
    for _ in 0..4 {
        let Some(st) = dopri::step(p, a.y0, a.f0, tau) else {
            break;
        };
        let g = section(st.y);
        let dg = st.f[1] - st.f[0];
        if dg == 0.0 {
            break;
        }
        let next = tau - g / dg;
        if !(next > 0.0 && next <= a.t1 - a.t0) {
            break;
        }
        tau = next;
    }
    a.t0 + tau
}

fn state_at(p: &Params, a: &Accepted, t: f64) -> [f64; 2] {
    dopri::step(p, a.y0, a.f0, t - a.t0)
        .map(|st| st.y)
        .unwrap_or_else(|| a.at(t))
}

/// Mean and amplitude of `x` over `[ta, tb]` from the buffered steps.
fn mean_and_amplitude(steps: &[Accepted], ta: f64, tb: f64) -> (f64, f64) {
    const SUB: usize = 8;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for a in steps {
        let (lo, hi) = (a.t0.max(ta), a.t1.min(tb));
        if hi <= lo {
            continue;
        }
        for j in 0..=SUB {
            let t = lo + (hi - lo) * j as f64 / SUB as f64;
            pts.push((t, a.at(t)[0]));
        }
    }
    let mut integral = 0.0;
    for w in pts.windows(2) {
        integral += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    let mean = integral / (tb - ta);
    let amp = pts
        .iter()
        .map(|&(_, x)| (x - mean).abs())
        .fold(0.0, f64::max);
    (mean, amp)
}

/// Follows the trajectory until it settles on a cycle, an equilibrium, or
/// leaves the domain. Needs two interior equilibria.
pub fn long_run(p: &Params, init: State, cfg: &IntegratorConfig) -> Result<LongRun> {
    check_start(cfg, &init)?;
    let interior = interior_equilibria(p)?;
    if interior.len() != 2 {
        return Err(Error::domain(
            "cycle detection needs Delta > 0 (two interior equilibria)",
        ));
    }
    if interior.iter().any(|e| e.state().dist(&init) < 1e-12) {
        return Err(Error::domain(
            "initial state sits on an interior equilibrium",
        ));
    }
    let eqs = equilibria(p)?;
    let transient = cfg.transient.unwrap_or(50.0 / p.s);

    let mut drv = Driver::new(p, cfg, init);
    let mut buffer: Vec<Accepted> = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut last_period: Option<f64> = None;
    let mut returns = 0;
    loop {
        let a = match drv.next(f64::MAX)? {
            Event::Budget => {
                return Err(Error::Inconclusive(format!(
                    "neither a cycle nor an equilibrium within {} steps (t = {})",
                    cfg.max_steps, drv.t
                )))
            }
            Event::Step(a) => a,
        };
        if a.y1[0] <= cfg.x_floor {
            return Ok(LongRun::DomainExit { t: a.t1 });
        }
        let here = State::new(a.y1[0], a.y1[1]);
        if let Some(e) = eqs
            .iter()
            .find(|e| e.state().dist(&here) < EQUILIBRIUM_CAPTURE)
        {
            return Ok(LongRun::Equilibrium {
                kind: e.kind,
                t: a.t1,
            });
        }
        if a.t1 <= transient {
            continue;
        }
        buffer.push(a);
        if !(section(a.y0) > 0.0 && section(a.y1) <= 0.0) {
            continue;
        }
        let tc = crossing_time(p, &a);
        if tc <= transient {
            buffer.clear();
            buffer.push(a);
            continue;
        }
        let xc = state_at(p, &a, tc)[0];
        returns += 1;
        if let Some((t_prev, x_prev)) = last {
            let period = tc - t_prev;
            let (mean, amp) = mean_and_amplitude(&buffer, t_prev, tc);
            let drift = (xc - x_prev).abs();
            if let Some(prev_period) = last_period {
                if drift < POSITION_RTOL * xc.abs()
                    && drift <= DRIFT_PER_AMPLITUDE * amp
                    && (period - prev_period).abs() < PERIOD_RTOL * period
                {
                    return Ok(LongRun::Cycle(Cycle {
                        period,
                        amplitude: amp,
                        mean_x: mean,
                        section_point: State::new(xc, xc),
                        returns,
                    }));
                }
            }
            last_period = Some(period);
        }
        last = Some((tc, xc));
        buffer.clear();
        buffer.push(a);
    }
}

/// The limit cycle reached from `init`, or `None` when the trajectory settles
/// on an equilibrium or leaves the domain.
pub fn detect_limit_cycle(
    p: &Params,
    init: State,
    cfg: &IntegratorConfig,
) -> Result<Option<Cycle>> {
    Ok(match long_run(p, init, cfg)? {
        LongRun::Cycle(c) => Some(c),
        _ => None,
    })
}

/// Section residual after integrating one reported period from the section
/// point, relative to the section point.
pub fn return_residual(p: &Params, c: &Cycle, cfg: &IntegratorConfig) -> Result<f64> {
    let tr = super::integrate(p, c.section_point, c.period, cfg)?;
    let end = tr.final_state();
    model::rhs(p, &end)?;
    Ok(end.dist(&c.section_point) / c.section_point.x)
}
