//! CSV writers and JSON helpers.
//!
//! Every float in a CSV is written with 17 significant digits so the file
//! round-trips bit-exactly; missing values are empty fields.

use std::io::Write;

use serde_json::Value;
use snod_core::{
    classify_regime, Equilibrium, ModelParams, NullclineSample, ThresholdCurve, Trajectory,
};

use crate::error::LabResult;
use crate::sweeps::{Diagram, FiPoint, Heatmap};

pub const TRAJECTORY_HEADER: [&str; 3] = ["t", "z", "s"];
pub const FIXED_POINTS_HEADER: [&str; 5] = ["z_hat", "s_hat", "trace", "det", "stability"];
pub const DIAGRAM_COLUMNS: [&str; 5] =
    ["z_hat", "stability", "cycle_zmin", "cycle_zmax", "polarity"];
pub const FI_HEADER: [&str; 3] = ["mu0", "b", "frequency"];
pub const HEATMAP_HEADER: [&str; 4] = ["mu0", "b", "frequency", "amplitude"];
pub const THRESHOLDS_HEADER: [&str; 6] =
    ["mu0", "z_star", "b_star", "z_star2", "b_star2", "regime"];
pub const NULLCLINES_HEADER: [&str; 4] = ["b", "z", "s_znull", "s_snull"];

/// 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rounds to 6 significant digits, for human-facing summaries.
pub fn round6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(TRAJECTORY_HEADER)?;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        out.write_record([fmt17(*t), fmt17(x.z), fmt17(x.s)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_fixed_points<W: Write>(w: W, fps: &[Equilibrium]) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(FIXED_POINTS_HEADER)?;
    for e in fps {
        out.write_record([
            fmt17(e.z_hat),
            fmt17(e.s_hat),
            fmt17(e.trace),
            fmt17(e.det),
            e.stability.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per fixed point, one per cycle envelope and one per marker, in
/// ascending parameter order; markers follow the rows of the grid value
/// just below them.
pub fn write_diagram<W: Write>(w: W, d: &Diagram) -> LabResult<()> {
    let mut out = writer(w);
    let mut header = vec![d.param.name()];
    header.extend(DIAGRAM_COLUMNS);
    out.write_record(&header)?;
    let mut markers = d.markers.iter().peekable();
    let empty = String::new;
    for row in &d.rows {
        while let Some(m) = markers.next_if(|m| m.param_value < row.param_value) {
            out.write_record([
                fmt17(m.param_value),
                fmt17(m.z_hat),
                m.kind.as_str().into(),
                empty(),
                empty(),
                empty(),
            ])?;
        }
        let v = fmt17(row.param_value);
        for e in &row.fixed_points {
            out.write_record([
                v.clone(),
                fmt17(e.z_hat),
                e.stability.as_str().into(),
                empty(),
                empty(),
                empty(),
            ])?;
        }
        for c in &row.cycle_envelopes {
            out.write_record([
                v.clone(),
                empty(),
                empty(),
                fmt17(c.z_min),
                fmt17(c.z_max),
                c.polarity.to_string(),
            ])?;
        }
    }
    for m in markers {
        out.write_record([
            fmt17(m.param_value),
            fmt17(m.z_hat),
            m.kind.as_str().into(),
            empty(),
            empty(),
            empty(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_fi<W: Write>(w: W, points: &[FiPoint]) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(FI_HEADER)?;
    for f in points {
        out.write_record([fmt17(f.mu0), fmt17(f.b), fmt17(f.frequency)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_heatmap<W: Write>(w: W, h: &Heatmap) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(HEATMAP_HEADER)?;
    for c in &h.cells {
        out.write_record([
            fmt17(c.mu0),
            fmt17(c.b),
            fmt17(c.frequency),
            fmt17(c.amplitude),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Undefined cells keep their regime and leave the numeric columns empty.
pub fn write_thresholds<W: Write>(
    w: W,
    p_base: &ModelParams,
    curve: &ThresholdCurve,
) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(THRESHOLDS_HEADER)?;
    for (&mu0, report) in curve.mu0_values.iter().zip(&curve.reports) {
        let row = match report {
            Some(r) => [
                fmt17(mu0),
                fmt17(r.z_star),
                fmt17(r.b_star),
                fmt17(r.z_star2),
                fmt17(r.b_star2),
                r.regime.as_str().into(),
            ],
            None => {
                let regime = classify_regime(&p_base.with_mu0(mu0)?);
                [
                    fmt17(mu0),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    regime.as_str().into(),
                ]
            }
        };
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_nullclines<W: Write>(w: W, families: &[(f64, Vec<NullclineSample>)]) -> LabResult<()> {
    let mut out = writer(w);
    out.write_record(NULLCLINES_HEADER)?;
    for (b, samples) in families {
        let bs = fmt17(*b);
        for x in samples {
            out.write_record([bs.clone(), fmt17(x.z), fmt17(x.s_znull), fmt17(x.s_snull)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
