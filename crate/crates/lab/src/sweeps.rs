//! Parameter sweeps: bifurcation diagrams in `b` and `μ0`, fI curves and the
//! `(μ0, b)` frequency heatmap.
//!
//! Cells are independent and run on the current rayon pool; results come
//! back in grid order, so output does not depend on the thread count.

use rayon::prelude::*;
use snod_core::{
    detect_spikes, find_fixed_points, integrate, pitchfork_mu0, Equilibrium, IntegratorConfig,
    ModelParams, SpikeDetector, SpikeMetrics, State,
};

use crate::error::LabResult;

/// Horizon, integrator and detector shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub integrator: IntegratorConfig,
    pub detector: SpikeDetector,
    pub t_end: f64,
}

impl SimSettings {
    /// Default integrator and detector with `window` time units after the transient.
    pub fn for_params(p: &ModelParams, window: f64) -> Self {
        let integrator = IntegratorConfig::for_params(p);
        Self {
            integrator,
            detector: SpikeDetector::for_params(p).with_transient(integrator.t_transient),
            t_end: integrator.t_transient + window,
        }
    }
}

pub fn spike_metrics(p: &ModelParams, ic: State, s: &SimSettings) -> LabResult<SpikeMetrics> {
    let traj = integrate(p, ic, s.t_end, &s.integrator)?;
    Ok(detect_spikes(&traj, &s.detector)?)
}

/// Symmetry-breaking initial condition for fI and heatmap cells.
pub const NUDGE: State = State { z: 0.01, s: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEnvelope {
    pub z_min: f64,
    pub z_max: f64,
    pub polarity: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRow {
    pub param_value: f64,
    pub fixed_points: Vec<Equilibrium>,
    pub cycle_envelopes: Vec<CycleEnvelope>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerKind {
    Hopf,
    Pitchfork,
}

impl MarkerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MarkerKind::Hopf => "H",
            MarkerKind::Pitchfork => "PF",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marker {
    pub param_value: f64,
    pub z_hat: f64,
    pub kind: MarkerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    B,
    Mu0,
}

impl SweptParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweptParam::B => "b",
            SweptParam::Mu0 => "mu0",
        }
    }

    fn apply(&self, p: &ModelParams, v: f64) -> LabResult<ModelParams> {
        Ok(match self {
            SweptParam::B => p.with_b(v)?,
            SweptParam::Mu0 => p.with_mu0(v)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub param: SweptParam,
    pub rows: Vec<DiagramRow>,
    pub markers: Vec<Marker>,
}

/// Envelopes closer than this (in `z`, relative to `1/d`) are the same cycle.
const ENVELOPE_MERGE: f64 = 1e-3;
const HOPF_BISECTIONS: usize = 60;

fn diagram_row(
    p: &ModelParams,
    value: f64,
    ics: &[State],
    s: &SimSettings,
) -> LabResult<DiagramRow> {
    let fixed_points = find_fixed_points(p);
    let mut cycle_envelopes: Vec<CycleEnvelope> = Vec::new();
    let tol = ENVELOPE_MERGE * p.z_bound();
    for &ic in ics {
        let m = spike_metrics(p, ic, s)?;
        if !m.is_spiking() {
            continue;
        }
        let env = CycleEnvelope {
            z_min: m.z_min,
            z_max: m.z_max,
            polarity: m.polarity,
        };
        let seen = cycle_envelopes
            .iter()
            .any(|e| (e.z_min - env.z_min).abs() < tol && (e.z_max - env.z_max).abs() < tol);
        if !seen {
            cycle_envelopes.push(env);
        }
    }
    cycle_envelopes.sort_by(|x, y| x.z_min.total_cmp(&y.z_min));
    Ok(DiagramRow {
        param_value: value,
        fixed_points,
        cycle_envelopes,
    })
}

fn diagram(
    p_base: &ModelParams,
    param: SweptParam,
    grid: &[f64],
    ics: &[State],
    s: &SimSettings,
) -> LabResult<Diagram> {
    let rows = grid
        .par_iter()
        .map(|&v| diagram_row(&param.apply(p_base, v)?, v, ics, s))
        .collect::<LabResult<Vec<_>>>()?;
    let markers = hopf_markers(p_base, param, &rows)?;
    Ok(Diagram {
        param,
        rows,
        markers,
    })
}

/// Locates trace sign changes (with `det > 0`) between consecutive rows by
/// bisection on the swept parameter, tracking the fixed point by index.
fn hopf_markers(
    p_base: &ModelParams,
    param: SweptParam,
    rows: &[DiagramRow],
) -> LabResult<Vec<Marker>> {
    let mut markers = Vec::new();
    for pair in rows.windows(2) {
        let (r0, r1) = (&pair[0], &pair[1]);
        if r0.fixed_points.len() != r1.fixed_points.len() {
            continue;
        }
        let n = r0.fixed_points.len();
        for j in 0..n {
            let (e0, e1) = (&r0.fixed_points[j], &r1.fixed_points[j]);
            if !(e0.det > 0.0 && e1.det > 0.0) || (e0.trace > 0.0) == (e1.trace > 0.0) {
                continue;
            }
            let (mut lo, mut hi) = (r0.param_value, r1.param_value);
            let mut z = e0.z_hat;
            let lo_sign = e0.trace > 0.0;
            for _ in 0..HOPF_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fps = find_fixed_points(&param.apply(p_base, mid)?);
                if fps.len() != n {
                    break;
                }
                z = fps[j].z_hat;
                if (fps[j].trace > 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            markers.push(Marker {
                param_value: 0.5 * (lo + hi),
                z_hat: z,
                kind: MarkerKind::Hopf,
            });
        }
    }
    Ok(markers)
}

/// Initial conditions `(0, 0)` and `(±0.5/d, 0)`.
pub fn default_ics_b(p: &ModelParams) -> Vec<State> {
    let z = 0.5 * p.z_bound();
    vec![
        State::new(0.0, 0.0),
        State::new(z, 0.0),
        State::new(-z, 0.0),
    ]
}

/// Initial conditions `z(0) = ±0.1`, `s(0) = 0`.
pub fn default_ics_mu0() -> Vec<State> {
    vec![State::new(0.1, 0.0), State::new(-0.1, 0.0)]
}

/// Fixed points and cycle envelopes across an ascending input grid, with Hopf markers.
pub fn diagram_in_b(
    p_base: &ModelParams,
    b_grid: &[f64],
    ics: &[State],
    s: &SimSettings,
) -> LabResult<Diagram> {
    diagram(p_base, SweptParam::B, b_grid, ics, s)
}

/// Fixed points and twin-cycle envelopes across an ascending `μ0` grid at
/// zero input, with Hopf markers and the pitchfork marker at `d/a`.
pub fn diagram_in_mu0(
    p_base: &ModelParams,
    mu0_grid: &[f64],
    ics: &[State],
    s: &SimSettings,
) -> LabResult<Diagram> {
    let mut d = diagram(p_base, SweptParam::Mu0, mu0_grid, ics, s)?;
    let pf = pitchfork_mu0(p_base);
    if let (Some(&lo), Some(&hi)) = (mu0_grid.first(), mu0_grid.last()) {
        if lo <= pf && pf <= hi {
            d.markers.push(Marker {
                param_value: pf,
                z_hat: 0.0,
                kind: MarkerKind::Pitchfork,
            });
            d.markers
                .sort_by(|x, y| x.param_value.total_cmp(&y.param_value));
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiPoint {
    pub mu0: f64,
    pub b: f64,
    pub frequency: f64,
}

/// Spike frequency against input at the `μ0` of `p_base`, started from [`NUDGE`].
pub fn fi_curve(p_base: &ModelParams, b_grid: &[f64], s: &SimSettings) -> LabResult<Vec<FiPoint>> {
    b_grid
        .par_iter()
        .map(|&b| {
            let m = spike_metrics(&p_base.with_b(b)?, NUDGE, s)?;
            Ok(FiPoint {
                mu0: p_base.mu0(),
                b,
                frequency: m.frequency,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapCell {
    pub mu0: f64,
    pub b: f64,
    /// Cycles per unit time; 0 at rest.
    pub frequency: f64,
    /// Post-transient peak-to-peak `z`.
    pub amplitude: f64,
}

/// Row-major in `μ0` (outer) then `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub mu0_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub cells: Vec<HeatmapCell>,
}

impl Heatmap {
    pub fn row(&self, i: usize) -> &[HeatmapCell] {
        let n = self.b_values.len();
        &self.cells[i * n..(i + 1) * n]
    }

    /// Smallest sampled input with `frequency > 0` per `μ0` row.
    pub fn spiking_boundary(&self) -> Vec<Option<f64>> {
        (0..self.mu0_values.len())
            .map(|i| self.row(i).iter().find(|c| c.frequency > 0.0).map(|c| c.b))
            .collect()
    }

    pub fn spiking_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        self.cells.iter().filter(|c| c.frequency > 0.0).count() as f64 / self.cells.len() as f64
    }
}

pub fn frequency_heatmap(
    p_base: &ModelParams,
    mu0_grid: &[f64],
    b_grid: &[f64],
    s: &SimSettings,
) -> LabResult<Heatmap> {
    let coords: Vec<(f64, f64)> = mu0_grid
        .iter()
        .flat_map(|&m| b_grid.iter().map(move |&b| (m, b)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(mu0, b)| {
            let p = p_base.with_mu0(mu0)?.with_b(b)?;
            let m = spike_metrics(&p, NUDGE, s)?;
            Ok(HeatmapCell {
                mu0,
                b,
                frequency: m.frequency,
                amplitude: m.amplitude(),
            })
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(Heatmap {
        mu0_values: mu0_grid.to_vec(),
        b_values: b_grid.to_vec(),
        cells,
    })
}
