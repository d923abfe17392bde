//! The `snod` command line.
//!
//! Each subcommand writes its bulk output (CSV, or JSON for `threshold`) to
//! `--out` and prints a JSON summary, including the resolved configuration,
//! on standard output. Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure, 4 regime mismatch, 1 i/o failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use snod_core::{
    bifurcation::input_thresholds, classify_regime, detect_spikes, find_fixed_points, fold_points,
    geometry::sample_nullclines, integrate, pitchfork_mu0, threshold_curve, Regime, SpikeMetrics,
};

use crate::config::{Purpose, RunConfig};
use crate::error::{LabError, LabResult};
use crate::output::{self, num, round6};
use crate::sweeps::{self, Diagram};

#[derive(Debug, Parser)]
#[command(
    name = "snod",
    version,
    about = "Spiking nonlinear opinion dynamics laboratory"
)]
pub struct Cli {
    /// JSON run configuration; missing keys take their defaults
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (a sidecar JSON, where produced, sits next to it)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps [default: available parallelism]
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Suppress the JSON summary on standard output
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and report its spike metrics
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        z0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s0: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// List every equilibrium with its stability
    FixedPoints,
    /// Closed-form Hopf thresholds b* and b**
    Threshold,
    /// b*(mu0) along the mu0 range
    ThresholdCurve,
    /// Parameter sweep
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
    },
    /// Sample both nullclines for a list of inputs
    Nullclines {
        /// Comma-separated inputs [default: config b_list, else 0,0.05,0.1]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    DiagramB,
    DiagramMu0,
    Fi,
    Heatmap,
}

impl SweepKind {
    fn purpose(self) -> Purpose {
        match self {
            SweepKind::DiagramB => Purpose::DiagramB,
            SweepKind::DiagramMu0 => Purpose::DiagramMu0,
            SweepKind::Fi => Purpose::Fi,
            SweepKind::Heatmap => Purpose::Heatmap,
        }
    }

    fn default_file(self) -> &'static str {
        match self {
            SweepKind::DiagramB => "diagram_b.csv",
            SweepKind::DiagramMu0 => "diagram_mu0.csv",
            SweepKind::Fi => "fi_curve.csv",
            SweepKind::Heatmap => "heatmap.csv",
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepKind::DiagramB => "diagram-b",
            SweepKind::DiagramMu0 => "diagram-mu0",
            SweepKind::Fi => "fi",
            SweepKind::Heatmap => "heatmap",
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&summary).unwrap_or_default()
                );
            }
            0
        }
        Err(e) => {
            eprintln!("snod: {e}");
            e.exit_code()
        }
    }
}

/// Runs the command and returns its summary.
pub fn execute(cli: &Cli) -> LabResult<Value> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.jobs == Some(0) {
        return Err(LabError::Config("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| LabError::Config(e.to_string()))?;
    pool.install(|| dispatch(cli, base))
}

fn out_path(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn create(path: &Path) -> LabResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, v: &Value) -> LabResult<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn metrics_json(m: &SpikeMetrics, round: bool) -> Value {
    let r = |x: f64| if round { round6(x) } else { x };
    json!({
        "spike_times": m.spike_times.iter().map(|&t| num(r(t))).collect::<Vec<_>>(),
        "period": m.period.map(|t| num(r(t))),
        "frequency": num(r(m.frequency)),
        "z_min": num(r(m.z_min)),
        "z_max": num(r(m.z_max)),
        "periodic": m.periodic,
        "polarity": m.polarity,
    })
}

fn dispatch(cli: &Cli, base: RunConfig) -> LabResult<Value> {
    match &cli.command {
        Command::Simulate { z0, s0, t_end } => {
            let mut c = base;
            if let Some(z) = z0 {
                c.z0 = *z;
            }
            if let Some(s) = s0 {
                c.s0 = *s;
            }
            if t_end.is_some() {
                c.t_end = *t_end;
            }
            cmd_simulate(cli, c.resolve(Purpose::Simulate)?)
        }
        Command::FixedPoints => cmd_fixed_points(cli, base.resolve(Purpose::FixedPoints)?),
        Command::Threshold => cmd_threshold(cli, base.resolve(Purpose::Threshold)?),
        Command::ThresholdCurve => cmd_threshold_curve(cli, base.resolve(Purpose::ThresholdCurve)?),
        Command::Sweep { kind } => cmd_sweep(cli, *kind, base.resolve(kind.purpose())?),
        Command::Nullclines { b } => {
            let mut c = base;
            if b.is_some() {
                c.b_list = b.clone();
            }
            cmd_nullclines(cli, c.resolve(Purpose::Nullclines)?)
        }
    }
}

fn cmd_simulate(cli: &Cli, c: RunConfig) -> LabResult<Value> {
    let p = c.params()?;
    let s = c.sim_settings()?;
    let traj = integrate(&p, c.initial_state()?, s.t_end, &s.integrator)?;
    let metrics = detect_spikes(&traj, &s.detector)?;
    let path = out_path(cli, "trajectory.csv");
    let mut w = create(&path)?;
    output::write_trajectory(&mut w, &traj)?;
    w.flush()?;
    write_json(&sidecar(&path), &metrics_json(&metrics, false))?;
    Ok(json!({
        "command": "simulate",
        "config": c,
        "output": path,
        "samples": traj.len(),
        "metrics": metrics_json(&metrics, true),
    }))
}

fn cmd_fixed_points(cli: &Cli, c: RunConfig) -> LabResult<Value> {
    let fps = find_fixed_points(&c.params()?);
    let path = out_path(cli, "fixed_points.csv");
    let mut w = create(&path)?;
    output::write_fixed_points(&mut w, &fps)?;
    w.flush()?;
    Ok(json!({
        "command": "fixed-points",
        "config": c,
        "output": path,
        "count": fps.len(),
        "fixed_points": fps
            .iter()
            .map(|e| json!({"z_hat": num(round6(e.z_hat)), "stability": e.stability.as_str()}))
            .collect::<Vec<_>>(),
    }))
}

fn cmd_threshold(cli: &Cli, c: RunConfig) -> LabResult<Value> {
    let p = c.params()?;
    let regime = classify_regime(&p);
    if regime != Regime::HopfWindow {
        return Err(LabError::Regime(regime));
    }
    let r = input_thresholds(&p)?;
    let report = |round: bool| {
        let f = |x: f64| num(if round { round6(x) } else { x });
        json!({
            "z_star": f(r.z_star),
            "z_star2": f(r.z_star2),
            "b_star": f(r.b_star),
            "b_star2": f(r.b_star2),
            "regime": r.regime.as_str(),
            "det_star": f(r.det_star),
            "det_star2": f(r.det_star2),
        })
    };
    let path = out_path(cli, "threshold.json");
    write_json(&path, &json!({"config": c, "report": report(false)}))?;
    Ok(json!({
        "command": "threshold",
        "config": c,
        "output": path,
        "report": report(true),
    }))
}

fn cmd_threshold_curve(cli: &Cli, c: RunConfig) -> LabResult<Value> {
    let p = c.params()?;
    let curve = threshold_curve(&p, &c.mu0_grid()?.values())?;
    let path = out_path(cli, "thresholds.csv");
    let mut w = create(&path)?;
    output::write_thresholds(&mut w, &p, &curve)?;
    w.flush()?;
    Ok(json!({
        "command": "threshold-curve",
        "config": c,
        "output": path,
        "rows": curve.mu0_values.len(),
        "defined": curve.defined_mask.iter().filter(|&&m| m).count(),
        "strictly_decreasing": curve.strictly_decreasing(pitchfork_mu0(&p)),
    }))
}

fn diagram_summary(d: &Diagram) -> (usize, f64, usize) {
    let rows = d.rows.len();
    let spiking = d
        .rows
        .iter()
        .filter(|r| !r.cycle_envelopes.is_empty())
        .count();
    let frac = if rows == 0 {
        0.0
    } else {
        spiking as f64 / rows as f64
    };
    (rows, frac, d.markers.len())
}

fn cmd_sweep(cli: &Cli, kind: SweepKind, c: RunConfig) -> LabResult<Value> {
    let p = c.params()?;
    let s = c.sim_settings()?;
    let path = out_path(cli, kind.default_file());
    let (cells, spiking_fraction, markers) = match kind {
        SweepKind::DiagramB => {
            let d =
                sweeps::diagram_in_b(&p, &c.b_grid()?.values(), &sweeps::default_ics_b(&p), &s)?;
            let mut w = create(&path)?;
            output::write_diagram(&mut w, &d)?;
            w.flush()?;
            let (n, f, m) = diagram_summary(&d);
            (n, f, Some(m))
        }
        SweepKind::DiagramMu0 => {
            let d = sweeps::diagram_in_mu0(
                &p,
                &c.mu0_grid()?.values(),
                &sweeps::default_ics_mu0(),
                &s,
            )?;
            let mut w = create(&path)?;
            output::write_diagram(&mut w, &d)?;
            w.flush()?;
            let (n, f, m) = diagram_summary(&d);
            (n, f, Some(m))
        }
        SweepKind::Fi => {
            let b_grid = c.b_grid()?.values();
            let mut points = Vec::new();
            for &mu0 in c.fi_mu0_values.as_deref().unwrap_or_default() {
                points.extend(sweeps::fi_curve(&p.with_mu0(mu0)?, &b_grid, &s)?);
            }
            let mut w = create(&path)?;
            output::write_fi(&mut w, &points)?;
            w.flush()?;
            let spiking = points.iter().filter(|x| x.frequency > 0.0).count();
            let frac = if points.is_empty() {
                0.0
            } else {
                spiking as f64 / points.len() as f64
            };
            (points.len(), frac, None)
        }
        SweepKind::Heatmap => {
            let h =
                sweeps::frequency_heatmap(&p, &c.mu0_grid()?.values(), &c.b_grid()?.values(), &s)?;
            let mut w = create(&path)?;
            output::write_heatmap(&mut w, &h)?;
            w.flush()?;
            (h.cells.len(), h.spiking_fraction(), None)
        }
    };
    let mut summary = json!({
        "command": "sweep",
        "kind": kind.name(),
        "config": c,
        "output": path,
        "cells": cells,
        "spiking_fraction": num(round6(spiking_fraction)),
    });
    if let Some(m) = markers {
        summary["markers"] = json!(m);
    }
    Ok(summary)
}

fn cmd_nullclines(cli: &Cli, c: RunConfig) -> LabResult<Value> {
    let p = c.params()?;
    let mut families = Vec::new();
    let mut folds = Vec::new();
    for &b in c.b_list.as_deref().unwrap_or_default() {
        let q = p.with_b(b)?;
        families.push((b, sample_nullclines(&q, c.z_steps)));
        // folds exist only on the positive branch for b >= 0; mirror for b < 0
        let f = fold_points(&q.with_b(b.abs())?).ok();
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        folds.push(match f {
            Some(f) => json!({
                "b": num(b),
                "z_fold_lo": num(sign * f.z_fold_lo),
                "z_fold_hi": num(sign * f.z_fold_hi),
                "s_fold_lo": num(f.s_fold_lo),
                "s_fold_hi": num(f.s_fold_hi),
                "separation": num(f.separation()),
            }),
            None => json!({"b": num(b), "folds": Value::Null}),
        });
    }
    let path = out_path(cli, "nullclines.csv");
    let mut w = create(&path)?;
    output::write_nullclines(&mut w, &families)?;
    w.flush()?;
    let side = sidecar(&path);
    write_json(&side, &json!({ "folds": folds }))?;
    Ok(json!({
        "command": "nullclines",
        "config": c,
        "output": path,
        "folds_output": side,
        "families": families.len(),
    }))
}
