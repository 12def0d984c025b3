use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lgaf_cli::{
    analyze, exit_code, on_fold, sweep, sweep_plot_script, trajectory_plot_script, usage,
    write_sweep_csv, Axis, SweepSpec, EXIT_NUMERICAL,
};
use lgaf_core::errata::errata;
use lgaf_core::integrate::{integrate, IntegratorConfig, TerminalStatus};
use lgaf_core::{Params, State};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "lgaf",
    version,
    about = "Leslie-Gower predator-prey model with Allee and fear effects"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Allee threshold, in (0, 1)
    #[arg(long)]
    m: f64,
    /// Predation coefficient
    #[arg(long)]
    a: f64,
    /// Fear intensity
    #[arg(long)]
    lam: f64,
    /// Predator growth rate
    #[arg(long)]
    s: f64,
}

impl ParamArgs {
    fn params(&self) -> anyhow::Result<Params> {
        Ok(Params::strong_allee(self.m, self.a, self.lam, self.s)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Lam,
    S,
    A,
    M,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Lam => Axis::Lam,
            AxisArg::S => Axis::S,
            AxisArg::A => Axis::A,
            AxisArg::M => Axis::M,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-point analysis report as JSON
    Analyze {
        #[command(flatten)]
        p: ParamArgs,
        /// Analyze on the fold: replace lam by the critical fear intensity
        #[arg(long)]
        fold: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibria and their stability along a parameter grid, as CSV
    Sweep {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Measure limit-cycle amplitudes below the Hopf thresholds (s axis)
        #[arg(long)]
        cycles: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script here
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Integrate one trajectory and write `t,x,y` CSV
    Simulate {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Published formulas and claims next to the computed values, as JSON
    Errata {
        #[command(flatten)]
        p: ParamArgs,
        /// Only list the disagreements
        #[arg(long)]
        only_disagreements: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w = open_out(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Run metadata next to a data file; the data file itself stays free of
/// timestamps so repeated runs are byte-identical.
fn write_sidecar(data: &Path, meta: serde_json::Value) -> anyhow::Result<()> {
    let mut name = data.as_os_str().to_owned();
    name.push(".meta.json");
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut meta = meta;
    meta["tool"] = json!(format!("lgaf {}", env!("CARGO_PKG_VERSION")));
    meta["unix_time"] = json!(secs);
    let mut f = File::create(PathBuf::from(name))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    writeln!(f)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Analyze { p, fold, out } => {
            let mut params = p.params()?;
            if fold {
                params = on_fold(&params)?;
            }
            write_json(&analyze(&params)?, out.as_deref())?;
        }
        Cmd::Sweep {
            p,
            axis,
            from,
            to,
            steps,
            jobs,
            cycles,
            out,
            plot,
        } => {
            let base = Params::new(p.m, p.a, p.lam, p.s)?;
            let spec = SweepSpec {
                axis: axis.into(),
                from,
                to,
                steps,
                base,
                cycles,
            };
            spec.validate()?;
            let jobs =
                jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(usage("--jobs must be at least 1"));
            }
            let rows = sweep(&spec, jobs)?;
            let mut w = open_out(out.as_deref())?;
            write_sweep_csv(&rows, &mut w)?;
            w.flush()?;
            if let Some(path) = &plot {
                let data = out
                    .as_ref()
                    .map_or("sweep.csv".into(), |o| o.display().to_string());
                write_text(path, &sweep_plot_script(&data, spec.axis))?;
            }
            if let Some(path) = &out {
                write_sidecar(
                    path,
                    json!({
                        "command": "sweep",
                        "axis": spec.axis.as_str(),
                        "from": from, "to": to, "steps": steps,
                        "params": base, "jobs": jobs, "cycles": cycles,
                        "rows": rows.len(),
                    }),
                )?;
            }
        }
        Cmd::Simulate {
            p,
            x0,
            y0,
            t_end,
            rtol,
            atol,
            out,
            plot,
        } => {
            let params = p.params()?;
            if !(t_end > 0.0 && t_end.is_finite()) {
                return Err(usage(format!("--t-end must be positive, got {t_end}")));
            }
            let cfg = IntegratorConfig::with_tolerances(rtol, atol);
            cfg.validate()?;
            let tr = integrate(&params, State::new(x0, y0), t_end, &cfg)?;
            let mut w = open_out(out.as_deref())?;
            tr.write_csv(&mut w)?;
            w.flush()?;
            let last = tr.last();
            eprintln!(
                "status={} t={} x={} y={} accepted={} rejected={}",
                tr.status.as_str(),
                last.t,
                last.x,
                last.y,
                tr.accepted,
                tr.rejected
            );
            if let Some(path) = &plot {
                let data = out
                    .as_ref()
                    .map_or("trajectory.csv".into(), |o| o.display().to_string());
                write_text(path, &trajectory_plot_script(&data))?;
            }
            if let Some(path) = &out {
                write_sidecar(
                    path,
                    json!({
                        "command": "simulate",
                        "params": params, "x0": x0, "y0": y0, "t_end": t_end,
                        "rtol": rtol, "atol": atol,
                        "status": tr.status.as_str(),
                        "accepted": tr.accepted, "rejected": tr.rejected,
                    }),
                )?;
            }
            if tr.status == TerminalStatus::StepBudget {
                return Ok(EXIT_NUMERICAL as u8);
            }
        }
        Cmd::Errata {
            p,
            only_disagreements,
            out,
        } => {
            let mut report = errata(&p.params()?)?;
            if only_disagreements {
                report.entries.retain(|e| !e.agrees);
            }
            write_json(&report, out.as_deref())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
