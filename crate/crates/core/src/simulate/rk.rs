//! Dormand–Prince 5(4) with FSAL and cubic Hermite dense output.

use alloc::vec::Vec;

use libm::pow;

use super::{IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::model::{vector_field, ModelParams, State};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

type Vec2 = [f64; 2];

#[inline]
fn f(y: Vec2, p: &ModelParams) -> Vec2 {
    let d = vector_field(State::new(y[0], y[1]), p);
    [d.dz, d.ds]
}

#[inline]
fn axpy(y: Vec2, h: f64, terms: &[(f64, Vec2)]) -> Vec2 {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Cubic Hermite interpolation on `[t0, t0 + h]`.
#[inline]
fn hermite(y0: Vec2, f0: Vec2, y1: Vec2, f1: Vec2, h: f64, theta: f64) -> Vec2 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    [
        h00 * y0[0] + h * h10 * f0[0] + h01 * y1[0] + h * h11 * f1[0],
        h00 * y0[1] + h * h10 * f0[1] + h01 * y1[1] + h * h11 * f1[1],
    ]
}

pub(super) fn run(
    p: &ModelParams,
    ic: State,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut y = [ic.z, ic.s];
    let mut t = 0.0;
    let mut k1 = f(y, p);
    let mut h = cfg.max_step.min(1e-2).min(t_end);

    times.push(0.0);
    states.push(ic);
    let mut next_sample = 1usize;

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        if h < 1e-12 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }
        let k2 = f(axpy(y, h, &[(A21, k1)]), p);
        let k3 = f(axpy(y, h, &[(A31, k1), (A32, k2)]), p);
        let k4 = f(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]), p);
        let k5 = f(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]), p);
        let k6 = f(
            axpy(
                y,
                h,
                &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            ),
            p,
        );
        let y_new = axpy(
            y,
            h,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
        );
        let k7 = f(y_new, p);

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / sc);
        }
        if !err.is_finite() || !(y_new[0].is_finite() && y_new[1].is_finite()) {
            if h <= 1e-12 * t.abs().max(1.0) {
                return Err(Error::NonFiniteState { t });
            }
            h *= MIN_FACTOR;
            continue;
        }

        if err <= 1.0 {
            let t_new = if t + h >= t_end { t_end } else { t + h };
            match cfg.sample_dt {
                Some(dt) => loop {
                    let ts = next_sample as f64 * dt;
                    if ts > t_new {
                        break;
                    }
                    let theta = (ts - t) / h;
                    let ys = hermite(y, k1, y_new, k7, h, theta);
                    times.push(ts);
                    states.push(State::new(ys[0], ys[1]));
                    next_sample += 1;
                },
                None => {
                    times.push(t_new);
                    states.push(State::new(y_new[0], y_new[1]));
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
        }

        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * pow(err, -0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        let factor = if err > 1.0 { factor.min(1.0) } else { factor };
        h = (h * factor).min(cfg.max_step);
    }

    Ok(Trajectory {
        times,
        states,
        params: *p,
    })
}
