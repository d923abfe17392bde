//! JSON run configuration.
//!
//! Every key is optional; missing keys take the canonical parameter set
//! (`mu0 = 0.8, a = d = 1, k = 2.3, k_s = 16, eps = 0.1, b = 0`). Horizons and
//! sweep ranges left out are resolved per command by [`RunConfig::resolve`],
//! and the resolved config is what gets echoed back, so feeding the echo to
//! a second run reproduces the first.

use std::path::Path;

use serde::{Deserialize, Serialize};
use snod_core::{IntegratorConfig, ModelParams, SpikeDetector, State};

use crate::error::{LabError, LabResult};
use crate::sweeps::SimSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d: f64,
    pub a: f64,
    pub k: f64,
    pub k_s: f64,
    pub mu0: f64,
    pub b: f64,
    pub eps: f64,

    pub rel_tol: f64,
    pub abs_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_transient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Output spacing; `null` records every accepted step.
    pub sample_dt: Option<f64>,

    /// Initial condition for `simulate`.
    pub z0: f64,
    pub s0: f64,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu0_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu0_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu0_steps: Option<usize>,
    /// Slices of the fI sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fi_mu0_values: Option<Vec<f64>>,
    /// Inputs of the nullcline families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_list: Option<Vec<f64>>,
    /// Nullcline samples per family.
    pub z_steps: usize,

    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModelParams::reference();
        Self {
            d: p.d(),
            a: p.a(),
            k: p.k(),
            k_s: p.k_s(),
            mu0: p.mu0(),
            b: p.b(),
            eps: p.eps(),
            rel_tol: 1e-8,
            abs_tol: 1e-8,
            max_step: None,
            t_transient: None,
            t_end: None,
            sample_dt: Some(0.01),
            z0: 0.0,
            s0: 0.0,
            b_min: None,
            b_max: None,
            b_steps: None,
            mu0_min: None,
            mu0_max: None,
            mu0_steps: None,
            fi_mu0_values: None,
            b_list: None,
            z_steps: 2000,
            seed: 0,
        }
    }
}

/// What a configuration is being resolved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Simulate,
    FixedPoints,
    Threshold,
    ThresholdCurve,
    DiagramB,
    DiagramMu0,
    Fi,
    Heatmap,
    Nullclines,
}

impl Purpose {
    fn simulates(self) -> bool {
        matches!(
            self,
            Purpose::Simulate
                | Purpose::DiagramB
                | Purpose::DiagramMu0
                | Purpose::Fi
                | Purpose::Heatmap
        )
    }
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> LabResult<Self> {
        let ok = min.is_finite()
            && max.is_finite()
            && ((steps >= 2 && min < max) || (steps == 1 && min == max));
        if !ok {
            return Err(LabError::Config(format!(
                "bad range [{min}, {max}] with {steps} steps"
            )));
        }
        Ok(Self { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.steps < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.steps - 1) as f64
        }
    }
}

pub const DEFAULT_FI_SLICES: [f64; 4] = [0.82, 0.9, 0.98, 1.06];
pub const DEFAULT_B_LIST: [f64; 3] = [0.0, 0.05, 0.1];

impl RunConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> LabResult<ModelParams> {
        Ok(ModelParams::new(
            self.d, self.a, self.k, self.k_s, self.mu0, self.b, self.eps,
        )?)
    }

    /// Fills every default the command needs and validates the result.
    pub fn resolve(&self, purpose: Purpose) -> LabResult<RunConfig> {
        let p = self.params()?;
        let mut c = self.clone();
        let base = IntegratorConfig::for_params(&p);
        if purpose.simulates() {
            c.max_step.get_or_insert(base.max_step);
            let t_tr = *c.t_transient.get_or_insert(base.t_transient);
            let window = if purpose == Purpose::Fi { 200.0 } else { 40.0 } / p.eps();
            c.t_end.get_or_insert(t_tr + window);
        }

        let b_default = match purpose {
            Purpose::DiagramB => Some((-0.3, 0.3, 301)),
            Purpose::Fi => Some((0.0, 0.1, 51)),
            Purpose::Heatmap => Some((0.0, 0.1, 60)),
            _ => None,
        };
        if let Some((lo, hi, n)) = b_default {
            c.b_min.get_or_insert(lo);
            c.b_max.get_or_insert(hi);
            c.b_steps.get_or_insert(n);
        }
        let mu0_default = match purpose {
            Purpose::DiagramMu0 => Some((0.7, 1.2, 101)),
            Purpose::Heatmap => Some((0.75, 1.1, 60)),
            Purpose::ThresholdCurve => Some((0.7, 0.99, 30)),
            _ => None,
        };
        if let Some((lo, hi, n)) = mu0_default {
            c.mu0_min.get_or_insert(lo);
            c.mu0_max.get_or_insert(hi);
            c.mu0_steps.get_or_insert(n);
        }
        match purpose {
            Purpose::Fi => {
                c.fi_mu0_values
                    .get_or_insert_with(|| DEFAULT_FI_SLICES.to_vec());
            }
            Purpose::Nullclines => {
                c.b_list.get_or_insert_with(|| DEFAULT_B_LIST.to_vec());
            }
            _ => {}
        }
        c.validate(purpose)?;
        Ok(c)
    }

    fn validate(&self, purpose: Purpose) -> LabResult<()> {
        let p = self.params()?;
        if purpose.simulates() {
            self.integrator()?;
            let t_end = self.t_end.unwrap_or(f64::NAN);
            if !(t_end.is_finite() && t_end > self.t_transient.unwrap_or(0.0)) {
                return Err(LabError::Config("t_end must exceed t_transient".into()));
            }
        }
        if self.b_steps.is_some() {
            self.b_grid()?;
        }
        if self.mu0_steps.is_some() {
            let g = self.mu0_grid()?;
            if g.min < 0.0 {
                return Err(LabError::Config("mu0 range must be non-negative".into()));
            }
        }
        match purpose {
            Purpose::Fi => {
                let slices = self.fi_mu0_values.as_deref().unwrap_or(&[]);
                if slices.is_empty() || slices.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                    return Err(LabError::Config(
                        "fi_mu0_values must be non-empty and >= 0".into(),
                    ));
                }
                if self.b_grid()?.min < 0.0 {
                    return Err(LabError::Config("fI inputs must be non-negative".into()));
                }
            }
            Purpose::DiagramMu0 if p.b() != 0.0 => {
                return Err(LabError::Config("diagram-mu0 requires b = 0".into()));
            }
            Purpose::Nullclines => {
                let list = self.b_list.as_deref().unwrap_or(&[]);
                if list.is_empty() {
                    return Err(LabError::Config("b_list must not be empty".into()));
                }
                if list.iter().any(|b| !b.is_finite()) {
                    return Err(LabError::Config("b_list entries must be finite".into()));
                }
                if self.z_steps < 2 {
                    return Err(LabError::Config("z_steps must be at least 2".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Integrator settings; requires a resolved config.
    pub fn integrator(&self) -> LabResult<IntegratorConfig> {
        let base = IntegratorConfig::for_params(&self.params()?);
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step.unwrap_or(base.max_step),
            t_transient: self.t_transient.unwrap_or(base.t_transient),
            sample_dt: self.sample_dt,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Integration and spike-detection settings; requires a resolved config.
    pub fn sim_settings(&self) -> LabResult<SimSettings> {
        let p = self.params()?;
        let integrator = self.integrator()?;
        let t_end = self
            .t_end
            .ok_or_else(|| LabError::Config("t_end unresolved".into()))?;
        Ok(SimSettings {
            integrator,
            detector: SpikeDetector::for_params(&p).with_transient(integrator.t_transient),
            t_end,
        })
    }

    pub fn initial_state(&self) -> LabResult<State> {
        let x = State::new(self.z0, self.s0);
        if !x.is_finite() {
            return Err(LabError::Config("initial state must be finite".into()));
        }
        Ok(x)
    }

    pub fn b_grid(&self) -> LabResult<Grid> {
        match (self.b_min, self.b_max, self.b_steps) {
            (Some(lo), Some(hi), Some(n)) => Grid::new(lo, hi, n),
            _ => Err(LabError::Config("b range incomplete".into())),
        }
    }

    pub fn mu0_grid(&self) -> LabResult<Grid> {
        match (self.mu0_min, self.mu0_max, self.mu0_steps) {
            (Some(lo), Some(hi), Some(n)) => Grid::new(lo, hi, n),
            _ => Err(LabError::Config("mu0 range incomplete".into())),
        }
    }
}
