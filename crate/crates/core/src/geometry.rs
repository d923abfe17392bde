//! Phase-plane geometry: nullclines, folds of the z-nullcline and the
//! relaxation-oscillation period in the singular limit `ε → 0`.
//!
//! The z-nullcline is a graph over `z`:
//! `s(z) = k z² + μ0 + (b − artanh(d z)) / (a z)`. For `b > 0` its positive
//! branch is S-shaped: a lower fold (local minimum of `s`) and an upper fold
//! (local maximum). The singular cycle slides down the small-`z` branch to
//! the lower fold, jumps at constant `s` to the large-`z` branch, slides up to
//! the upper fold and jumps back.

use alloc::vec::Vec;

use libm::atanh;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullclineSample {
    pub z: f64,
    pub s_znull: f64,
    pub s_snull: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldPoints {
    pub z_fold_lo: f64,
    pub z_fold_hi: f64,
    pub s_fold_lo: f64,
    pub s_fold_hi: f64,
}

impl FoldPoints {
    pub fn separation(&self) -> f64 {
        self.z_fold_hi - self.z_fold_lo
    }
}

fn in_domain(z: f64, p: &ModelParams) -> bool {
    z != 0.0 && (p.d() * z).abs() < 1.0
}

/// `s` on the z-nullcline at abscissa `z`, for `0 < |z| < 1/d`.
pub fn z_nullcline(z: f64, p: &ModelParams) -> Result<f64> {
    if !in_domain(z, p) {
        return Err(Error::DomainError { z });
    }
    Ok(s_of(z, p))
}

#[inline]
fn s_of(z: f64, p: &ModelParams) -> f64 {
    p.k() * z * z + p.mu0() + (p.b() - atanh(p.d() * z)) / (p.a() * z)
}

/// `ds/dz` along the z-nullcline.
pub fn z_nullcline_slope(z: f64, p: &ModelParams) -> Result<f64> {
    if !in_domain(z, p) {
        return Err(Error::DomainError { z });
    }
    Ok(slope_of(z, p))
}

#[inline]
fn slope_of(z: f64, p: &ModelParams) -> f64 {
    let (a, d) = (p.a(), p.d());
    let az = a * z;
    2.0 * p.k() * z - (d * az / (1.0 - d * d * z * z) + a * (p.b() - atanh(d * z))) / (az * az)
}

/// `ṡ = ε (−s + k_s z⁴)`, whose level sets shade the phase plane.
pub fn s_dot_level(z: f64, s: f64, p: &ModelParams) -> f64 {
    let z2 = z * z;
    p.eps() * (-s + p.k_s() * z2 * z2)
}

/// Both nullclines on `n` midpoints of a uniform partition of `(−1/d, 1/d)`;
/// `n` even keeps `z = 0` off the grid.
pub fn sample_nullclines(p: &ModelParams, n: usize) -> Vec<NullclineSample> {
    let zb = p.z_bound();
    let h = 2.0 * zb / n as f64;
    (0..n)
        .map(|i| -zb + (i as f64 + 0.5) * h)
        .filter(|&z| in_domain(z, p))
        .map(|z| NullclineSample {
            z,
            s_znull: s_of(z, p),
            s_snull: p.k_s() * z * z * z * z,
        })
        .collect()
}

const FOLD_SCAN: usize = 4096;

fn bisect_by<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 {
            break;
        }
        let g_mid = g(mid);
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lower and upper folds of the positive z-nullcline branch.
///
/// Requires `b >= 0`. [`Error::NoFold`] when the slope does not change sign
/// twice (monotone or saturated nullcline).
pub fn fold_points(p: &ModelParams) -> Result<FoldPoints> {
    if p.b() < 0.0 {
        return Err(Error::InvalidConfig("fold_points requires b >= 0"));
    }
    let zb = p.z_bound();
    let grid = |i: usize| zb * i as f64 / FOLD_SCAN as f64;
    let mut lo = None;
    let mut prev = (grid(1), slope_of(grid(1), p));
    for i in 2..FOLD_SCAN {
        let z = grid(i);
        let v = slope_of(z, p);
        if lo.is_none() && prev.1 < 0.0 && v >= 0.0 {
            lo = Some(bisect_by(|x| slope_of(x, p), prev.0, z));
        } else if lo.is_some() && prev.1 > 0.0 && v <= 0.0 {
            let z_lo = lo.unwrap();
            let z_hi = bisect_by(|x| slope_of(x, p), prev.0, z);
            return Ok(FoldPoints {
                z_fold_lo: z_lo,
                z_fold_hi: z_hi,
                s_fold_lo: s_of(z_lo, p),
                s_fold_hi: s_of(z_hi, p),
            });
        }
        prev = (z, v);
    }
    Err(Error::NoFold)
}

/// Inset of the quadrature endpoints adjacent to a fold.
const FOLD_INSET: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-8;

/// Period of the relaxation cycle in the singular limit: the time spent
/// on the two slow branches, jumps taken as instantaneous.
pub fn singular_period(p: &ModelParams) -> Result<f64> {
    let folds = fold_points(p)?;
    let zb = p.z_bound();
    // landing on the upper branch at the height of the lower fold
    let z_up = {
        let g = |z: f64| s_of(z, p) - folds.s_fold_lo;
        let hi = zb * (1.0 - 1e-15);
        if !(g(folds.z_fold_hi) > 0.0 && g(hi) < 0.0) {
            return Err(Error::NoFold);
        }
        bisect_by(g, folds.z_fold_hi, hi)
    };
    // landing on the lower branch at the height of the upper fold
    let z_dn = {
        let g = |z: f64| s_of(z, p) - folds.s_fold_hi;
        let lo = zb * 1e-12;
        if !(g(lo) > 0.0 && g(folds.z_fold_lo) < 0.0) {
            return Err(Error::NoFold);
        }
        bisect_by(g, lo, folds.z_fold_lo)
    };

    // slow-flow gap k_s z⁴ − s(z): negative on the lower segment, positive on the upper
    let gap = |z: f64| p.k_s() * z * z * z * z - s_of(z, p);
    let segments = [
        (z_dn, folds.z_fold_lo - FOLD_INSET, -1.0),
        (folds.z_fold_hi + FOLD_INSET, z_up, 1.0),
    ];
    let mut total = 0.0;
    for &(lo, hi, sign) in &segments {
        let n = 512;
        for i in 0..=n {
            let z = lo + (hi - lo) * i as f64 / n as f64;
            if !(sign * gap(z) > 0.0) {
                return Err(Error::QuadratureDivergence);
            }
        }
        let integrand = |z: f64| (slope_of(z, p) / gap(z)).abs();
        total += adaptive_simpson(&integrand, lo, hi, QUAD_TOL)?;
    }
    Ok(total / p.eps())
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureDivergence);
    }
    if depth == 0 || delta.abs() <= 15.0 * tol {
        if depth == 0 && delta.abs() > 15.0 * tol {
            return Err(Error::QuadratureDivergence);
        }
        return Ok(left + right + delta / 15.0);
    }
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}
