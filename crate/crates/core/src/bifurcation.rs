//! Spiking thresholds: Hopf inputs `b*`, `b**` and the pitchfork in `μ0`.

use alloc::vec::Vec;

use libm::{atanh, sqrt};

use crate::algebra::{cubic_real_roots, det_poly_at, regime_witness, Regime, TraceCoeffs};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Trace roots and the inputs that place the equilibrium on them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub z_star: f64,
    pub z_star2: f64,
    pub b_star: f64,
    pub b_star2: f64,
    pub regime: Regime,
    /// `det J` at `z*`; positive when `b*` is a genuine Hopf point.
    pub det_star: f64,
    pub det_star2: f64,
}

impl ThresholdReport {
    /// Both thresholds are Hopf points (purely imaginary eigenvalue pair).
    pub fn is_hopf(&self) -> bool {
        self.det_star > 0.0 && self.det_star2 > 0.0
    }
}

/// The two zeros `z* < z**` of the equilibrium trace on `(0, 1/d)`.
///
/// Requires a stable origin, and the trace polynomial negative at both ends
/// of `[0, 1/d²]` and positive at its interior maximum `ξ0`. This holds throughout
/// [`Regime::HopfWindow`] and in part of [`Regime::MixedCase`]; anything else
/// is a [`Error::RegimeMismatch`].
pub fn trace_roots_z(p: &ModelParams) -> Result<(f64, f64)> {
    let w = regime_witness(p);
    let mismatch = Error::RegimeMismatch { regime: w.regime };
    let tc = TraceCoeffs::from_params(p);
    let peak_positive = matches!(w.trace_at_xi0, Some(t) if t > 0.0);
    if w.regime == Regime::SaddleOrigin || !(tc.c0 - p.eps() < 0.0 && peak_positive) {
        return Err(mismatch);
    }
    let x_max = 1.0 / (p.d() * p.d());
    let roots = cubic_real_roots(tc.c3, -tc.c2, tc.c1, tc.c0 - p.eps())?;
    let inside: Vec<f64> = roots
        .into_iter()
        .filter(|&x| x > 0.0 && x < x_max)
        .collect();
    match inside.as_slice() {
        [lo, hi] => Ok((sqrt(*lo), sqrt(*hi))),
        _ => Err(mismatch),
    }
}

/// Input that makes `z` an equilibrium: the explicit inverse of the
/// fixed-point equation in `b`. Needs `|d z| < 1`.
pub fn input_for_equilibrium(z: f64, p: &ModelParams) -> f64 {
    let z2 = z * z;
    atanh(p.d() * z) - p.a() * z * (p.k() * z2 + p.mu0() - p.k_s() * z2 * z2)
}

/// Closed-form Hopf thresholds.
///
/// The input `b` of `p` is ignored.
pub fn input_thresholds(p: &ModelParams) -> Result<ThresholdReport> {
    let (z_star, z_star2) = trace_roots_z(p)?;
    Ok(ThresholdReport {
        z_star,
        z_star2,
        b_star: input_for_equilibrium(z_star, p),
        b_star2: input_for_equilibrium(z_star2, p),
        regime: regime_witness(p).regime,
        det_star: det_poly_at(z_star, p),
        det_star2: det_poly_at(z_star2, p),
    })
}

/// Symmetry-breaking pitchfork of the origin at zero input, `μ0* = d/a`.
pub fn pitchfork_mu0(p: &ModelParams) -> f64 {
    p.d() / p.a()
}

/// `b*` sampled along a `μ0` grid; cells without trace roots are masked.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub mu0_values: Vec<f64>,
    /// NaN where undefined.
    pub b_star_values: Vec<f64>,
    pub defined_mask: Vec<bool>,
    pub reports: Vec<Option<ThresholdReport>>,
}

/// Width of the band below the pitchfork excluded from monotonicity checks.
pub const NEAR_PITCHFORK_BAND: f64 = 1e-6;
/// Slack for the strict-decrease check.
pub const MONOTONE_SLACK: f64 = 1e-12;

impl ThresholdCurve {
    /// `b*` strictly decreases between every pair of consecutive defined cells
    /// outside the near-pitchfork band.
    pub fn strictly_decreasing(&self, pitchfork: f64) -> bool {
        let usable = |i: usize| {
            self.defined_mask[i] && self.mu0_values[i] <= pitchfork - NEAR_PITCHFORK_BAND
        };
        (1..self.mu0_values.len())
            .filter(|&i| usable(i) && usable(i - 1))
            .all(|i| self.b_star_values[i] < self.b_star_values[i - 1] - MONOTONE_SLACK)
    }
}

pub fn threshold_curve(p_base: &ModelParams, mu0_grid: &[f64]) -> Result<ThresholdCurve> {
    if mu0_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("mu0 grid must be strictly ascending"));
    }
    let mut curve = ThresholdCurve {
        mu0_values: mu0_grid.to_vec(),
        b_star_values: Vec::with_capacity(mu0_grid.len()),
        defined_mask: Vec::with_capacity(mu0_grid.len()),
        reports: Vec::with_capacity(mu0_grid.len()),
    };
    for &mu0 in mu0_grid {
        let report = input_thresholds(&p_base.with_mu0(mu0)?).ok();
        curve
            .b_star_values
            .push(report.map_or(f64::NAN, |r| r.b_star));
        curve.defined_mask.push(report.is_some());
        curve.reports.push(report);
    }
    Ok(curve)
}
