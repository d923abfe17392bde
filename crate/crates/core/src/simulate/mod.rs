//! Time integration, spike detection and limit-cycle envelopes.

mod rk;
mod spikes;

use alloc::vec::Vec;

pub use spikes::{detect_spikes, SpikeDetector, SpikeMetrics};

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};

/// Adaptive integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Samples before this time are excluded from spike and envelope metrics.
    pub t_transient: f64,
    /// Uniform output spacing (dense output); `None` records every accepted step.
    pub sample_dt: Option<f64>,
}

impl IntegratorConfig {
    /// Tolerances `1e-8`, `max_step = min(0.1, 0.1/ε)`, transient `10/ε`,
    /// output every `0.01`.
    pub fn for_params(p: &ModelParams) -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-8,
            max_step: 0.1f64.min(0.1 / p.eps()),
            t_transient: 10.0 / p.eps(),
            sample_dt: Some(0.01),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol_ok = |t: f64| t > 0.0 && t <= 1e-2;
        if !tol_ok(self.rel_tol) {
            return Err(Error::InvalidConfig("rel_tol must lie in (0, 1e-2]"));
        }
        if !tol_ok(self.abs_tol) {
            return Err(Error::InvalidConfig("abs_tol must lie in (0, 1e-2]"));
        }
        if !(self.max_step.is_finite() && self.max_step > 0.0) {
            return Err(Error::InvalidConfig("max_step must be positive"));
        }
        if !(self.t_transient.is_finite() && self.t_transient >= 0.0) {
            return Err(Error::InvalidConfig("t_transient must be non-negative"));
        }
        if let Some(dt) = self.sample_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidConfig("sample_dt must be positive"));
            }
        }
        Ok(())
    }
}

/// Sampled solution; `times` strictly increasing, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub params: ModelParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Samples with `t >= t0`.
    pub fn after(&self, t0: f64) -> impl Iterator<Item = (f64, State)> + '_ {
        let start = self.times.partition_point(|&t| t < t0);
        self.times[start..]
            .iter()
            .copied()
            .zip(self.states[start..].iter().copied())
    }
}

/// Integrates the model from `ic` over `[0, t_end]`.
pub fn integrate(
    p: &ModelParams,
    ic: State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidConfig("t_end must be positive"));
    }
    if !ic.is_finite() {
        return Err(Error::NonFiniteState { t: 0.0 });
    }
    rk::run(p, ic, t_end, cfg)
}

/// Forward-invariant rectangle `[−1/d, 1/d] × [−1, k_s/d⁴]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub z_min: f64,
    pub z_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl BoundingBox {
    pub fn contains(&self, x: State, tol: f64) -> bool {
        x.z >= self.z_min - tol
            && x.z <= self.z_max + tol
            && x.s >= self.s_min - tol
            && x.s <= self.s_max + tol
    }
}

pub fn bounding_box(p: &ModelParams) -> BoundingBox {
    let inv_d = 1.0 / p.d();
    let inv_d2 = inv_d * inv_d;
    BoundingBox {
        z_min: -inv_d,
        z_max: inv_d,
        s_min: -1.0,
        s_max: p.k_s() * inv_d2 * inv_d2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub z_min: f64,
    pub z_max: f64,
    /// Post-transient `z` takes both signs.
    pub encircles_origin: bool,
}

impl Envelope {
    pub fn width(&self) -> f64 {
        self.z_max - self.z_min
    }
}

/// Post-transient extent of `z` for the orbit started at `ic`.
pub fn limit_cycle_envelope(
    p: &ModelParams,
    ic: State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Envelope> {
    let traj = integrate(p, ic, t_end, cfg)?;
    envelope_of(&traj, cfg.t_transient)
}

pub(crate) fn envelope_of(traj: &Trajectory, t_transient: f64) -> Result<Envelope> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, x) in traj.after(t_transient) {
        lo = lo.min(x.z);
        hi = hi.max(x.z);
    }
    if lo > hi {
        return Err(Error::TooShort {
            span: traj.t_end(),
            required: t_transient,
        });
    }
    Ok(Envelope {
        z_min: lo,
        z_max: hi,
        encircles_origin: lo < 0.0 && hi > 0.0,
    })
}
