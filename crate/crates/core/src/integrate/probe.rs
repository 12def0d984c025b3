//! Direct simulation of the flow in a small quarter-disc around the origin.

use serde::{Deserialize, Serialize};

use super::{integrate, IntegratorConfig, TerminalStatus};
use crate::error::{Error, Result};
use crate::model::{Params, State};
use crate::stability::OriginVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeVerdict {
    Escapes,
    ConvergesToOrigin,
    Mixed,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Escapes => "escapes",
            Self::ConvergesToOrigin => "converges_to_origin",
            Self::Mixed => "mixed",
        }
    }

    /// Whether this outcome is the one the blow-up verdict predicts.
    pub fn agrees_with(self, v: OriginVerdict) -> bool {
        matches!(
            (self, v),
            (Self::Escapes, OriginVerdict::Unstable)
                | (Self::ConvergesToOrigin, OriginVerdict::Attracting)
                | (Self::Mixed, OriginVerdict::SectorMixed)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeOutcome {
    Escaped,
    ReachedFloor,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub init: State,
    pub outcome: ProbeOutcome,
    pub t_final: f64,
    /// Largest distance from the origin along the run.
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginProbe {
    pub verdict: ProbeVerdict,
    pub delta: f64,
    pub runs: Vec<ProbeRun>,
}

/// Fan of eight interior rays plus the prey axis, with tolerances fit for the
/// tiny magnitudes near the floor.
pub fn origin_attraction_probe(p: &Params, delta: f64) -> Result<OriginProbe> {
    let cfg = IntegratorConfig {
        rtol: 1e-8,
        atol: 1e-22,
        max_steps: 2_000_000,
        ..IntegratorConfig::default()
    };
    probe_with(p, delta, 8, &cfg)
}

pub fn probe_with(
    p: &Params,
    delta: f64,
    rays: usize,
    cfg: &IntegratorConfig,
) -> Result<OriginProbe> {
    if !(delta > 0.0 && delta <= 1e-2) {
        return Err(Error::domain(format!(
            "probe radius must lie in (0, 1e-2], got {delta}"
        )));
    }
    cfg.validate()?;
    if delta <= cfg.x_floor {
        return Err(Error::domain("probe radius must exceed the domain floor"));
    }
    // long enough for an exp(-m t) decay from delta to the floor, plus the
    // slow predator time scale
    let t_end = 4.0 * (delta / cfg.x_floor).ln() / p.m + 50.0 / p.s;
    let mut starts = vec![State::new(delta, 0.0)];
    for k in 1..=rays {
        let th = k as f64 * std::f64::consts::FRAC_PI_2 / (rays + 1) as f64;
        starts.push(State::new(delta * th.cos(), delta * th.sin()));
    }
    let ball = 10.0 * delta;
    let mut runs = Vec::with_capacity(starts.len());
    for init in starts {
        let tr = integrate(p, init, t_end, cfg)?;
        if tr.status == TerminalStatus::StepBudget {
            return Err(Error::Inconclusive(format!(
                "origin probe from ({:e}, {:e}) exhausted its step budget",
                init.x, init.y
            )));
        }
        let mut left = false;
        let mut reentered = false;
        let mut max_radius: f64 = 0.0;
        for s in &tr.samples {
            let r = s.x.hypot(s.y);
            max_radius = max_radius.max(r);
            if r > ball {
                left = true;
            } else if left {
                reentered = true;
            }
        }
        let outcome = if tr.status == TerminalStatus::DomainExit {
            ProbeOutcome::ReachedFloor
        } else if left && !reentered {
            ProbeOutcome::Escaped
        } else {
            ProbeOutcome::Other
        };
        runs.push(ProbeRun {
            init,
            outcome,
            t_final: tr.last().t,
            max_radius,
        });
    }
    let verdict = if runs.iter().all(|r| r.outcome == ProbeOutcome::Escaped) {
        ProbeVerdict::Escapes
    } else if runs.iter().all(|r| r.outcome == ProbeOutcome::ReachedFloor) {
        ProbeVerdict::ConvergesToOrigin
    } else {
        ProbeVerdict::Mixed
    };
    Ok(OriginProbe {
        verdict,
        delta,
        runs,
    })
}
