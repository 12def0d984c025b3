//! Adaptive Dormand–Prince integration of the model, limit-cycle detection on
//! the diagonal section and a probe of the flow near the origin.

mod cycle;
mod dopri;
mod probe;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use cycle::{
    detect_limit_cycle, long_run, return_residual, Cycle, LongRun, EQUILIBRIUM_CAPTURE,
};
pub use probe::{
    origin_attraction_probe, probe_with, OriginProbe, ProbeOutcome, ProbeRun, ProbeVerdict,
};

use crate::error::{Error, Result};
use crate::model::{Params, State};
use dopri::V2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Budget of attempted steps, rejected ones included.
    pub max_steps: usize,
    /// Trajectories with `x <= x_floor` stop with [`TerminalStatus::DomainExit`].
    pub x_floor: f64,
    /// Stop with [`TerminalStatus::Converged`] once `max |rhs|` drops below this.
    pub converge_tol: Option<f64>,
    /// Transient skipped before cycle detection; `50 / s` when unset.
    pub transient: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h0: 1e-3,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            x_floor: 1e-12,
            converge_tol: None,
            transient: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return bad("rtol must be positive");
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return bad("atol must be positive");
        }
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return bad("h0 must be positive");
        }
        if !(self.h_min >= 0.0 && self.h_min < self.h0) {
            return bad("need 0 <= h_min < h0");
        }
        if !(self.h_max >= self.h0) {
            return bad("need h_max >= h0");
        }
        if !(self.x_floor > 0.0 && self.x_floor.is_finite()) {
            return bad("x_floor must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        if let Some(tol) = self.converge_tol {
            if !(tol > 0.0) {
                return bad("converge_tol must be positive");
            }
        }
        if let Some(t) = self.transient {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("transient must be non-negative");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminalStatus {
    TimeExhausted,
    StepBudget,
    DomainExit,
    Converged,
}

impl TerminalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TimeExhausted => "time_exhausted",
            Self::StepBudget => "step_budget",
            Self::DomainExit => "domain_exit",
            Self::Converged => "converged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: TerminalStatus,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self
            .samples
            .last()
            .expect("trajectory has at least the initial sample")
    }

    pub fn final_state(&self) -> State {
        let s = self.last();
        State::new(s.x, s.y)
    }

    /// CSV with header `t,x,y`, one accepted step per row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x,y")?;
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.t, s.x, s.y)?;
        }
        w.flush()
    }
}

/// One accepted step with the data needed for dense output.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Accepted {
    pub t0: f64,
    pub y0: V2,
    pub f0: V2,
    pub t1: f64,
    pub y1: V2,
    pub f1: V2,
}

impl Accepted {
    pub fn at(&self, t: f64) -> V2 {
        let h = self.t1 - self.t0;
        dopri::hermite(self.y0, self.f0, self.y1, self.f1, h, (t - self.t0) / h)
    }
}

pub(crate) enum Event {
    Step(Accepted),
    Budget,
}

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
// PI control exponents for a fifth-order error estimate
const ALPHA: f64 = 0.17;
const BETA: f64 = 0.04;

pub(crate) struct Driver<'a> {
    p: &'a Params,
    cfg: &'a IntegratorConfig,
    pub t: f64,
    pub y: V2,
    f: V2,
    h: f64,
    err_old: f64,
    pub attempts: usize,
    pub accepted: usize,
    pub rejected: usize,
}

impl<'a> Driver<'a> {
    pub fn new(p: &'a Params, cfg: &'a IntegratorConfig, init: State) -> Self {
        let (fx, fy) = crate::model::field(p, init.x, init.y);
        Self {
            p,
            cfg,
            t: 0.0,
            y: [init.x, init.y],
            f: [fx, fy],
            h: cfg.h0,
            err_old: 1e-4,
            attempts: 0,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advance by one accepted step without passing `t_end`.
    pub fn next(&mut self, t_end: f64) -> Result<Event> {
        let mut just_rejected = false;
        loop {
            if self.attempts >= self.cfg.max_steps {
                return Ok(Event::Budget);
            }
            let remaining = t_end - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < self.cfg.h_min && !last {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("step size {h:e} below h_min"),
                });
            }
            self.attempts += 1;
            let outcome =
                dopri::step(self.p, self.y, self.f, h).filter(|st| st.y[0] > 0.0 && st.y[1] >= 0.0);
            let Some(st) = outcome else {
                // left the domain mid-step; the error estimate is meaningless
                self.rejected += 1;
                self.h = 0.25 * h;
                just_rejected = true;
                continue;
            };
            let err = dopri::error_norm(st.err, self.y, st.y, self.cfg.rtol, self.cfg.atol);
            if !err.is_finite() {
                self.rejected += 1;
                self.h = 0.25 * h;
                just_rejected = true;
                continue;
            }
            if err <= 1.0 {
                let fac = err.powf(ALPHA) / self.err_old.powf(BETA) / SAFETY;
                let mut h_new = h / fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                if just_rejected {
                    h_new = h_new.min(h);
                }
                self.err_old = err.max(1e-4);
                let t1 = if last { t_end } else { self.t + h };
                if !(t1 > self.t) {
                    return Err(Error::Integration {
                        t: self.t,
                        reason: "time stopped advancing".into(),
                    });
                }
                let acc = Accepted {
                    t0: self.t,
                    y0: self.y,
                    f0: self.f,
                    t1,
                    y1: st.y,
                    f1: st.f,
                };
                self.t = t1;
                self.y = st.y;
                self.f = st.f;
                // a short final step says nothing about the next step size
                if !last || h_new > self.h {
                    self.h = h_new.min(self.cfg.h_max);
                }
                self.accepted += 1;
                return Ok(Event::Step(acc));
            }
            self.rejected += 1;
            self.h = h / (err.powf(ALPHA) / SAFETY).min(1.0 / FAC_MIN);
            just_rejected = true;
        }
    }
}

fn check_start(cfg: &IntegratorConfig, init: &State) -> Result<()> {
    cfg.validate()?;
    if !(init.x > cfg.x_floor && init.x.is_finite() && init.y >= 0.0 && init.y.is_finite()) {
        return Err(Error::OutsideDomain {
            x: init.x,
            y: init.y,
        });
    }
    Ok(())
}

/// Integrate from `init` over `[0, t_end]`, keeping every accepted step.
pub fn integrate(
    p: &Params,
    init: State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    check_start(cfg, &init)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!(
            "t_end must be positive and finite, got {t_end}"
        )));
    }
    let mut drv = Driver::new(p, cfg, init);
    let mut samples = vec![Sample {
        t: 0.0,
        x: init.x,
        y: init.y,
    }];
    let status = loop {
        if drv.t >= t_end {
            break TerminalStatus::TimeExhausted;
        }
        match drv.next(t_end)? {
            Event::Budget => break TerminalStatus::StepBudget,
            Event::Step(a) => {
                samples.push(Sample {
                    t: a.t1,
                    x: a.y1[0],
                    y: a.y1[1],
                });
                if a.y1[0] <= cfg.x_floor {
                    break TerminalStatus::DomainExit;
                }
                if let Some(tol) = cfg.converge_tol {
                    if a.f1[0].abs().max(a.f1[1].abs()) < tol {
                        break TerminalStatus::Converged;
                    }
                }
            }
        }
    };
    Ok(Trajectory {
        samples,
        status,
        accepted: drv.accepted,
        rejected: drv.rejected,
    })
}

/// Fixed-step integration with `n` equal steps; used for order checks.
pub fn integrate_fixed(p: &Params, init: State, t_end: f64, n: usize) -> Result<State> {
    if n == 0 || !(t_end > 0.0) {
        return Err(Error::Config("need n > 0 and t_end > 0".into()));
    }
    crate::model::rhs(p, &init)?;
    let h = t_end / n as f64;
    let mut y = [init.x, init.y];
    let (fx, fy) = crate::model::field(p, y[0], y[1]);
    let mut f = [fx, fy];
    for k in 0..n {
        let st = dopri::step(p, y, f, h).ok_or_else(|| Error::Integration {
            t: k as f64 * h,
            reason: "stage left the domain".into(),
        })?;
        y = st.y;
        f = st.f;
    }
    Ok(State::new(y[0], y[1]))
}
