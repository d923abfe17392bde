//! Closed-form trace/determinant polynomials at equilibria, a real-cubic
//! solver, and the parameter-regime classifier built on them.
//!
//! At an equilibrium `(ẑ, k_s ẑ⁴)` both the trace and the determinant of the
//! Jacobian are cubics in `x = ẑ²`:
//!
//! ```text
//! tr J   = c3 x³ − c2 x² + c1 x + c0 − ε
//! det J  = ε (−ĉ3 x³ + ĉ2 x² − ĉ1 x − ĉ0)
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{acos, cbrt, cos, sqrt};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Coefficients of the trace polynomial in `x = z²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCoeffs {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

/// Coefficients of `det J / ε` in `x = z²` (signs as in `−ĉ3 x³ + ĉ2 x² − ĉ1 x − ĉ0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetCoeffs {
    pub chat3: f64,
    pub chat2: f64,
    pub chat1: f64,
    pub chat0: f64,
}

/// The two roots of the derivative of a cubic in `x = z²`, lower first.
///
/// Both fields are NaN when `real` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicStationaryPoints {
    pub lower: f64,
    pub upper: f64,
    pub real: bool,
}

impl CubicStationaryPoints {
    /// Real and strictly above the numerical-zero floor of `1e-12`.
    pub fn lower_positive(&self) -> bool {
        self.real && self.lower > POSITIVE_FLOOR
    }
}

const POSITIVE_FLOOR: f64 = 1e-12;

/// Roots of `3 lead x² − 2 second x + first` for a cubic of the form
/// `lead x³ − second x² + first x + const`.
fn derivative_roots(lead: f64, second: f64, first: f64) -> CubicStationaryPoints {
    let radicand = second * second - 3.0 * first * lead;
    if radicand < 0.0 {
        return CubicStationaryPoints {
            lower: f64::NAN,
            upper: f64::NAN,
            real: false,
        };
    }
    let r = sqrt(radicand);
    CubicStationaryPoints {
        lower: (second - r) / (3.0 * lead),
        upper: (second + r) / (3.0 * lead),
        real: true,
    }
}

impl TraceCoeffs {
    pub fn from_params(p: &ModelParams) -> Self {
        let (a, d, k, k_s, mu0) = (p.a(), p.d(), p.k(), p.k_s(), p.mu0());
        let d2 = d * d;
        Self {
            c3: a * d2 * k_s,
            c2: 3.0 * a * d2 * k + a * k_s,
            c1: 3.0 * a * k - a * d2 * mu0,
            c0: a * mu0 - d,
        }
    }

    /// Trace at the equilibrium with `z² = x`.
    pub fn eval(&self, x: f64, eps: f64) -> f64 {
        ((self.c3 * x - self.c2) * x + self.c1) * x + self.c0 - eps
    }

    /// `ξ0` (lower) and `ξ1` (upper).
    pub fn stationary_points(&self) -> CubicStationaryPoints {
        derivative_roots(self.c3, self.c2, self.c1)
    }
}

impl DetCoeffs {
    pub fn from_params(p: &ModelParams) -> Self {
        let t = TraceCoeffs::from_params(p);
        Self {
            chat3: 5.0 * t.c3,
            chat2: t.c2 + 4.0 * p.a() * p.k_s(),
            chat1: t.c1,
            chat0: t.c0,
        }
    }

    /// `det J / ε` at the equilibrium with `z² = x`.
    pub fn eval_scaled(&self, x: f64) -> f64 {
        ((-self.chat3 * x + self.chat2) * x - self.chat1) * x - self.chat0
    }

    /// `ζ0` (lower) and `ζ1` (upper).
    pub fn stationary_points(&self) -> CubicStationaryPoints {
        derivative_roots(self.chat3, self.chat2, self.chat1)
    }
}

/// Trace of the Jacobian at the lifted point `(z, k_s z⁴)`; exact at equilibria.
pub fn trace_poly_at(z: f64, p: &ModelParams) -> f64 {
    TraceCoeffs::from_params(p).eval(z * z, p.eps())
}

/// Determinant of the Jacobian at the lifted point `(z, k_s z⁴)`; exact at equilibria.
pub fn det_poly_at(z: f64, p: &ModelParams) -> f64 {
    p.eps() * DetCoeffs::from_params(p).eval_scaled(z * z)
}

fn horner(coeffs: [f64; 4], x: f64) -> f64 {
    ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3]
}

fn horner_deriv(coeffs: [f64; 4], x: f64) -> f64 {
    (3.0 * coeffs[0] * x + 2.0 * coeffs[1]) * x + coeffs[2]
}

/// All real roots of `a3 x³ + a2 x² + a1 x + a0`, ascending.
///
/// Trigonometric form when three real roots exist, Cardano otherwise, each
/// root polished by a Newton step that is kept only if it lowers the residual.
/// A leading coefficient below `1e-14` of the coefficient scale drops the
/// degree.
pub fn cubic_real_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<Vec<f64>> {
    let scale = a3.abs().max(a2.abs()).max(a1.abs()).max(a0.abs());
    if scale == 0.0 || (a3.abs().max(a2.abs()).max(a1.abs()) <= 1e-14 * scale) {
        return Err(Error::AllCoefficientsZero);
    }
    let mut roots = Vec::with_capacity(3);
    if a3.abs() < 1e-14 * scale {
        quadratic_roots(a2, a1, a0, scale, &mut roots);
    } else {
        let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
        let shift = b / 3.0;
        let p = c - b * shift;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let half_q = 0.5 * q;
        let third_p = p / 3.0;
        let disc = half_q * half_q + third_p * third_p * third_p;
        if disc > 0.0 {
            let big = -half_q.signum() * cbrt(half_q.abs() + sqrt(disc));
            let t = if big != 0.0 { big - third_p / big } else { 0.0 };
            roots.push(t - shift);
        } else if p == 0.0 {
            roots.extend([-shift; 3]);
        } else {
            let m = sqrt(-third_p);
            let arg = (-half_q / (m * m * m)).clamp(-1.0, 1.0);
            let theta = acos(arg) / 3.0;
            for i in 0..3 {
                roots.push(2.0 * m * cos(theta - 2.0 * PI * i as f64 / 3.0) - shift);
            }
        }
    }
    let coeffs = [a3, a2, a1, a0];
    for r in roots.iter_mut() {
        let f = horner(coeffs, *r);
        let df = horner_deriv(coeffs, *r);
        if df != 0.0 {
            let cand = *r - f / df;
            if cand.is_finite() && horner(coeffs, cand).abs() < f.abs() {
                *r = cand;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn quadratic_roots(a2: f64, a1: f64, a0: f64, scale: f64, out: &mut Vec<f64>) {
    if a2.abs() < 1e-14 * scale {
        out.push(-a0 / a1);
        return;
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return;
    }
    let q = -0.5 * (a1 + a1.signum() * sqrt(disc));
    if q == 0.0 {
        out.extend([0.0, 0.0]);
        return;
    }
    out.push(q / a2);
    out.push(a0 / q);
}

/// Qualitative regime of the input-driven dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Unique equilibrium for every input, stable for every input.
    AlwaysStable,
    /// Unique equilibrium with exactly two Hopf inputs `b* < b**`.
    HopfWindow,
    /// `a μ0 > d`: the origin is a saddle at zero input.
    SaddleOrigin,
    /// None of the above can be certified.
    MixedCase,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::AlwaysStable => "AlwaysStable",
            Regime::HopfWindow => "HopfWindow",
            Regime::SaddleOrigin => "SaddleOrigin",
            Regime::MixedCase => "MixedCase",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The quantities [`classify_regime`] decides on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeWitness {
    pub zeta: CubicStationaryPoints,
    pub xi: CubicStationaryPoints,
    /// `det J` at `z = √ζ0`, when `ζ0` is real and positive.
    pub det_at_zeta0: Option<f64>,
    /// `tr J` at `z = √ξ0`, when `ξ0` is real and positive.
    pub trace_at_xi0: Option<f64>,
    pub c0: f64,
    pub regime: Regime,
}

pub fn regime_witness(p: &ModelParams) -> RegimeWitness {
    let tc = TraceCoeffs::from_params(p);
    let dc = DetCoeffs::from_params(p);
    let zeta = dc.stationary_points();
    let xi = tc.stationary_points();
    let det_at_zeta0 = zeta
        .lower_positive()
        .then(|| p.eps() * dc.eval_scaled(zeta.lower));
    let trace_at_xi0 = xi.lower_positive().then(|| tc.eval(xi.lower, p.eps()));
    let regime = if tc.c0 > 0.0 {
        Regime::SaddleOrigin
    } else {
        match (det_at_zeta0, trace_at_xi0) {
            (Some(det), Some(tr)) if det > 0.0 && tr > 0.0 && tc.c0 < 0.0 => Regime::HopfWindow,
            (Some(det), Some(tr)) if det > 0.0 && tr < 0.0 => Regime::AlwaysStable,
            _ => Regime::MixedCase,
        }
    };
    RegimeWitness {
        zeta,
        xi,
        det_at_zeta0,
        trace_at_xi0,
        c0: tc.c0,
        regime,
    }
}

pub fn classify_regime(p: &ModelParams) -> Regime {
    regime_witness(p).regime
}

/// Sufficient condition for twin spike cycles past the pitchfork:
/// `d³/(3a) < k < k_s (c2 − √(c2² − 4 c1 c3)) / (2 c3)`, coefficients taken at
/// `μ0 = d/a`.
pub fn thm3_condition(p: &ModelParams) -> bool {
    let (a, d, k) = (p.a(), p.d(), p.k());
    if k <= d * d * d / (3.0 * a) {
        return false;
    }
    let at_pf = match p.with_mu0(d / a) {
        Ok(q) => TraceCoeffs::from_params(&q),
        Err(_) => return false,
    };
    let radicand = at_pf.c2 * at_pf.c2 - 4.0 * at_pf.c1 * at_pf.c3;
    if radicand < 0.0 {
        return false;
    }
    let upper = p.k_s() * (at_pf.c2 - sqrt(radicand)) / (2.0 * at_pf.c3);
    k < upper
}
