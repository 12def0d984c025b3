//! Reports, sweeps and file formats behind the `lgaf` binary.

use std::fmt;
use std::io::{Read, Write};

use anyhow::{bail, Context};
use lgaf_core::bifurcation::{
    cusp_check, hopf_analysis, saddle_node_type, sotomayor_saddle_node, CuspReport, HopfReport,
    SaddleNodeReport, SotomayorCheck,
};
use lgaf_core::equilibria::{
    allee_competition_threshold, critical_fear, equilibria, existence_regime,
};
use lgaf_core::errata::{errata, Erratum};
use lgaf_core::integrate::{long_run, IntegratorConfig, LongRun};
use lgaf_core::stability::{
    at_fold, branch_threshold, classify, origin_blowup, s_zero, OriginVerdict,
};
use lgaf_core::{
    Equilibrium, EquilibriumKind, Error, ExistenceRegime, LinearAnalysis, Params, StabilityLabel,
    State,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Bad flag values that clap cannot see (empty ranges, `t_end = 0`).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Process exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidParameter { .. } | Error::NotStrongAllee(_) | Error::Config(_)) => {
            EXIT_USAGE
        }
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        Some(_) => EXIT_DOMAIN,
        None => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumEntry {
    pub equilibrium: Equilibrium,
    pub linear: LinearAnalysis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub a1_star: f64,
    pub lam_sn: Option<f64>,
    /// Trace threshold at the fold point, when the parameters sit on the fold.
    pub s0: Option<f64>,
    /// Trace threshold of E4.
    pub s_star: Option<f64>,
    /// Trace threshold of E5.
    pub s_star_e5: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginSummary {
    pub verdict: OriginVerdict,
    /// Whether the verdict matches the published "unstable" claim.
    pub paper_agrees: bool,
    /// Slopes `y / x` of the divisor singularities.
    pub divisor_slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSection {
    pub sotomayor: Option<SotomayorCheck>,
    pub saddle_node: Option<SaddleNodeReport>,
    pub cusp: Option<CuspReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub params: Params,
    pub regime: ExistenceRegime,
    pub equilibria: Vec<EquilibriumEntry>,
    pub thresholds: Thresholds,
    pub origin: OriginSummary,
    /// Hopf data for E4 and E5 at their trace thresholds.
    pub hopf: Vec<HopfReport>,
    pub fold: Option<FoldSection>,
    /// Published formulas and claims that the computed values contradict.
    pub errata: Vec<Erratum>,
}

/// Full single-point analysis.
pub fn analyze(p: &Params) -> anyhow::Result<AnalysisReport> {
    p.require_strong_allee()?;
    let regime = existence_regime(p)?;
    let mut entries = Vec::new();
    for e in equilibria(p)? {
        entries.push(EquilibriumEntry {
            equilibrium: e,
            linear: classify(p, &e)?,
        });
    }
    let thresholds = Thresholds {
        a1_star: allee_competition_threshold(p.m)?,
        lam_sn: critical_fear(p.m, p.a).ok(),
        s0: s_zero(p).ok(),
        s_star: branch_threshold(p, EquilibriumKind::E4).ok(),
        s_star_e5: branch_threshold(p, EquilibriumKind::E5).ok(),
    };
    let b = origin_blowup(p)?;
    let origin = OriginSummary {
        verdict: b.origin_verdict,
        paper_agrees: b.paper_agrees,
        divisor_slopes: b.singularities.iter().map(|d| d.v).collect(),
    };
    let mut hopf = Vec::new();
    for kind in [EquilibriumKind::E4, EquilibriumKind::E5] {
        if thresholds.s_star.is_some() {
            hopf.push(hopf_analysis(p, kind)?);
        }
    }
    let fold = at_fold(p).then(|| FoldSection {
        sotomayor: sotomayor_saddle_node(p).ok(),
        saddle_node: saddle_node_type(p).ok(),
        cusp: cusp_check(p).ok(),
    });
    let errata = errata(p)?.disagreements().cloned().collect();
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        params: *p,
        regime,
        equilibria: entries,
        thresholds,
        origin,
        hopf,
        fold,
        errata,
    })
}

/// Replaces `lam` by the critical fear intensity; a domain error when the
/// fold does not exist.
pub fn on_fold(p: &Params) -> anyhow::Result<Params> {
    Ok(p.with_lam(critical_fear(p.m, p.a)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Lam,
    S,
    A,
    M,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Lam => "lam",
            Axis::S => "s",
            Axis::A => "a",
            Axis::M => "m",
        }
    }

    /// `base` with the swept parameter set to `v`. Not validated.
    pub fn set(self, base: &Params, v: f64) -> Params {
        let mut p = *base;
        match self {
            Axis::Lam => p.lam = v,
            Axis::S => p.s = v,
            Axis::A => p.a = v,
            Axis::M => p.m = v,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: Params,
    /// Measure cycle amplitudes on s-sweeps.
    pub cycles: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(usage(format!(
                "empty sweep range [{}, {}]",
                self.from, self.to
            )));
        }
        if self.from <= 0.0 {
            return Err(usage(format!(
                "sweep range must be positive, got from = {}",
                self.from
            )));
        }
        if self.steps < 2 {
            return Err(usage(format!(
                "need at least 2 grid points, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub kind: EquilibriumKind,
    pub x: f64,
    pub y: f64,
    /// Empty when the point could not be classified.
    pub label: Option<StabilityLabel>,
    pub trace: Option<f64>,
    pub det: Option<f64>,
    pub amplitude: Option<f64>,
}

// cycles are only looked for this close below a trace threshold
const CYCLE_WINDOW: f64 = 0.8;

fn cycle_amplitude(p: &Params, e: &Equilibrium) -> Option<f64> {
    let sh = branch_threshold(p, e.kind).ok()?;
    if !(p.s < sh && p.s > CYCLE_WINDOW * sh) {
        return None;
    }
    let cfg = IntegratorConfig {
        rtol: 1e-10,
        atol: 1e-13,
        max_steps: 3_000_000,
        ..Default::default()
    };
    match long_run(p, State::new(1.001 * e.x, e.y), &cfg).ok()? {
        LongRun::Cycle(c) => Some(c.amplitude),
        _ => None,
    }
}

fn rows_at(spec: &SweepSpec, v: f64) -> Vec<SweepRow> {
    let p = spec.axis.set(&spec.base, v);
    let blank = |e: &Equilibrium| SweepRow {
        param: v,
        kind: e.kind,
        x: e.x,
        y: e.y,
        label: None,
        trace: None,
        det: None,
        amplitude: None,
    };
    let eqs = match p.validate().and_then(|_| equilibria(&p)) {
        Ok(eqs) => eqs,
        // invalid grid point: boundary rows with error markers
        Err(_) => {
            return lgaf_core::equilibria::boundary_equilibria(&p)
                .iter()
                .map(blank)
                .collect()
        }
    };
    eqs.iter()
        .map(|e| {
            let mut row = blank(e);
            if let Ok(la) = classify(&p, e) {
                row.label = Some(la.label);
                row.trace = Some(la.trace);
                row.det = Some(la.det);
                if spec.cycles && spec.axis == Axis::S && e.kind.is_interior() && la.trace > 0.0 {
                    row.amplitude = cycle_amplitude(&p, e);
                }
            }
            row
        })
        .collect()
}

/// One row per grid point and equilibrium, in grid order, computed on at
/// most `jobs` threads.
pub fn sweep(spec: &SweepSpec, jobs: usize) -> anyhow::Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building the worker pool")?;
    let chunks: Vec<Vec<SweepRow>> =
        pool.install(|| grid.par_iter().map(|&v| rows_at(spec, v)).collect());
    let mut rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.kind.cmp(&b.kind)));
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 8] = [
    "param",
    "kind",
    "x",
    "y",
    "label",
    "trace",
    "det",
    "amplitude",
];

/// 17 significant digits, enough to read back the same double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in rows {
        out.write_record([
            fmt_f64(r.param),
            r.kind.as_str().to_string(),
            fmt_f64(r.x),
            fmt_f64(r.y),
            r.label.map(|l| l.as_str().to_string()).unwrap_or_default(),
            fmt_opt(r.trace),
            fmt_opt(r.det),
            fmt_opt(r.amplitude),
        ])?;
    }
    out.flush()?;
    Ok(())
}

const ALL_LABELS: [StabilityLabel; 8] = [
    StabilityLabel::Saddle,
    StabilityLabel::StableNode,
    StabilityLabel::UnstableNode,
    StabilityLabel::StableFocus,
    StabilityLabel::UnstableFocus,
    StabilityLabel::WeakCenter,
    StabilityLabel::SaddleNodeDegenerate,
    StabilityLabel::NilpotentDegenerate,
];

const ALL_KINDS: [EquilibriumKind; 5] = [
    EquilibriumKind::E1,
    EquilibriumKind::E2,
    EquilibriumKind::E3,
    EquilibriumKind::E4,
    EquilibriumKind::E5,
];

fn parse_opt(field: &str) -> anyhow::Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        Ok(Some(
            field
                .parse()
                .with_context(|| format!("bad number {field:?}"))?,
        ))
    }
}

pub fn read_sweep_csv<R: Read>(r: R) -> anyhow::Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(SWEEP_HEADER) {
        bail!("unexpected sweep header {:?}", rdr.headers()?);
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let kind = ALL_KINDS
            .into_iter()
            .find(|k| k.as_str() == &rec[1])
            .with_context(|| format!("unknown equilibrium {:?}", &rec[1]))?;
        let label = match &rec[4] {
            "" => None,
            s => Some(
                ALL_LABELS
                    .into_iter()
                    .find(|l| l.as_str() == s)
                    .with_context(|| format!("unknown label {s:?}"))?,
            ),
        };
        rows.push(SweepRow {
            param: rec[0].parse()?,
            kind,
            x: rec[2].parse()?,
            y: rec[3].parse()?,
            label,
            trace: parse_opt(&rec[5])?,
            det: parse_opt(&rec[6])?,
            amplitude: parse_opt(&rec[7])?,
        });
    }
    Ok(rows)
}

/// Gnuplot commands drawing `x` against the swept parameter, one series per
/// equilibrium kind.
pub fn sweep_plot_script(csv_path: &str, axis: Axis) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside\n");
    s.push_str(&format!("set xlabel '{}'\n", axis.as_str()));
    s.push_str("set ylabel 'x'\n");
    let series: Vec<String> = ALL_KINDS
        .iter()
        .map(|k| {
            format!(
                "'{csv_path}' using 1:(strcol(2) eq '{k}' ? $3 : 1/0) skip 1 with points pt 7 ps 0.4 title '{k}'",
                k = k.as_str()
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    s
}

/// Gnuplot commands for a trajectory file: time series and phase plane.
pub fn trajectory_plot_script(csv_path: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set multiplot layout 1,2\n\
         set xlabel 't'\n\
         plot '{csv_path}' using 1:2 skip 1 with lines title 'x', '' using 1:3 skip 1 with lines title 'y'\n\
         set xlabel 'x'\n\
         set ylabel 'y'\n\
         plot '{csv_path}' using 2:3 skip 1 with lines notitle\n\
         unset multiplot\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Params {
        Params::new(0.25, 0.2, 0.3, 0.1).unwrap()
    }

    #[test]
    fn report_for_the_fixture() {
        let r = analyze(&fixture()).unwrap();
        assert_eq!(r.schema_version, 1);
        assert_eq!(r.equilibria.len(), 4);
        let e5 = r
            .equilibria
            .iter()
            .find(|e| e.equilibrium.kind == EquilibriumKind::E5)
            .unwrap();
        assert!(e5.linear.label.is_stable());
        assert!((r.thresholds.s_star.unwrap() - 0.161405).abs() < 1e-6);
        assert!(r.errata.iter().any(|e| e.id == "origin.p2.v"));
        assert!(r.fold.is_none());
    }

    #[test]
    fn report_json_round_trips() {
        let r = analyze(&fixture()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn grid_ends_exactly() {
        let spec = SweepSpec {
            axis: Axis::Lam,
            from: 0.3,
            to: 0.6,
            steps: 301,
            base: fixture(),
            cycles: false,
        };
        let g = spec.grid();
        assert_eq!(g.len(), 301);
        assert_eq!(g[0], 0.3);
        assert_eq!(g[300], 0.6);
    }

    #[test]
    fn sweep_rows_ordered_and_independent_of_jobs() {
        let spec = SweepSpec {
            axis: Axis::Lam,
            from: 0.3,
            to: 0.6,
            steps: 31,
            base: fixture(),
            cycles: false,
        };
        let one = sweep(&spec, 1).unwrap();
        let four = sweep(&spec, 4).unwrap();
        assert_eq!(one, four);
        assert!(one
            .windows(2)
            .all(|w| (w[0].param, w[0].kind) < (w[1].param, w[1].kind)));
    }

    #[test]
    fn invalid_grid_points_get_markers() {
        let spec = SweepSpec {
            axis: Axis::M,
            from: 0.5,
            to: 1.5,
            steps: 3,
            base: fixture(),
            cycles: false,
        };
        let rows = sweep(&spec, 2).unwrap();
        let last: Vec<_> = rows.iter().filter(|r| r.param == 1.5).collect();
        assert!(!last.is_empty() && last.iter().all(|r| r.label.is_none()));
    }

    #[test]
    fn csv_round_trip() {
        let spec = SweepSpec {
            axis: Axis::S,
            from: 0.1,
            to: 0.25,
            steps: 16,
            base: fixture(),
            cycles: false,
        };
        let rows = sweep(&spec, 2).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_sweep_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&usage("x")), EXIT_USAGE);
        assert_eq!(exit_code(&Error::NotStrongAllee(1.5).into()), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Domain("x".into()).into()), EXIT_DOMAIN);
        assert_eq!(
            exit_code(&Error::Inconclusive("x".into()).into()),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn fold_needs_a_below_threshold() {
        let p = Params::new(0.25, 0.3, 0.3, 0.1).unwrap();
        assert_eq!(exit_code(&on_fold(&p).unwrap_err()), EXIT_DOMAIN);
    }
}
