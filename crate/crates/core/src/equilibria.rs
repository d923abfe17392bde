//! Fixed points: exhaustive location, stability, and continuation in the input.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{det_poly_at, trace_poly_at};
use crate::error::{Error, Result};
use crate::model::{residual_h, ModelParams};

/// Uniform scan density over `[−1/d, 1/d]`.
pub const SCAN_POINTS: usize = 4096;
/// Roots closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;
/// `|tr J|` below this with `det J > 0` counts as a center.
pub const CENTER_TOL: f64 = 1e-8;
const CLASSIFY_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    StableNode,
    UnstableSource,
    Saddle,
    Center,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::StableNode => "StableNode",
            Stability::UnstableSource => "UnstableSource",
            Stability::Saddle => "Saddle",
            Stability::Center => "Center",
        }
    }

    pub fn from_trace_det(trace: f64, det: f64) -> Self {
        if det <= 0.0 {
            Stability::Saddle
        } else if trace.abs() <= CENTER_TOL {
            Stability::Center
        } else if trace < 0.0 {
            Stability::StableNode
        } else {
            Stability::UnstableSource
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub z_hat: f64,
    pub s_hat: f64,
    pub trace: f64,
    pub det: f64,
    pub stability: Stability,
}

/// Classifies a candidate root of the fixed-point residual.
pub fn classify(z: f64, p: &ModelParams) -> Result<Equilibrium> {
    let residual = residual_h(z, p);
    if !(residual.abs() <= CLASSIFY_RESIDUAL_TOL) {
        return Err(Error::NotAFixedPoint { z, residual });
    }
    let trace = trace_poly_at(z, p);
    let det = det_poly_at(z, p);
    let z2 = z * z;
    Ok(Equilibrium {
        z_hat: z,
        s_hat: p.k_s() * z2 * z2,
        trace,
        det,
        stability: Stability::from_trace_det(trace, det),
    })
}

/// Bisects a sign change of the residual on `[lo, hi]` down to a bracket of
/// `1e-12`, returning whichever endpoint has the smaller residual.
fn bisect(mut lo: f64, mut hi: f64, p: &ModelParams) -> f64 {
    let mut h_lo = residual_h(lo, p);
    let mut h_hi = residual_h(hi, p);
    if h_lo == 0.0 {
        return lo;
    }
    if h_hi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = residual_h(mid, p);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid > 0.0) == (h_lo > 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
    }
    if h_lo.abs() <= h_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Every fixed point on `[−1/d, 1/d]`, ascending in `z`, with a scan of
/// [`SCAN_POINTS`] samples.
pub fn find_fixed_points(p: &ModelParams) -> Vec<Equilibrium> {
    find_fixed_points_with(p, SCAN_POINTS)
}

pub fn find_fixed_points_with(p: &ModelParams, scan_points: usize) -> Vec<Equilibrium> {
    let n = scan_points.max(2);
    let zb = p.z_bound();
    let grid = |i: usize| -zb + 2.0 * zb * i as f64 / (n - 1) as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_z = grid(0);
    let mut prev_h = residual_h(prev_z, p);
    if prev_h == 0.0 {
        roots.push(prev_z);
    }
    for i in 1..n {
        let z = grid(i);
        let h = residual_h(z, p);
        if h == 0.0 {
            roots.push(z);
        } else if prev_h != 0.0 && (h > 0.0) != (prev_h > 0.0) {
            roots.push(bisect(prev_z, z, p));
        }
        prev_z = z;
        prev_h = h;
    }
    roots.dedup_by(|b, a| (*b - *a).abs() <= MERGE_TOL);
    roots
        .into_iter()
        .filter_map(|z| classify(z, p).ok())
        .collect()
}

/// Fixed-point branch continued from the origin-connected equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Input values for which the branch was continued; a prefix of the
    /// requested grid when `terminated`.
    pub b_values: Vec<f64>,
    pub z_values: Vec<f64>,
    /// The branch disappeared (saddle-node) or jumped; continuation stopped.
    pub terminated: bool,
}

/// Brackets grow from this half-width until they straddle a root.
const BRACKET_START: f64 = 1e-6;
/// Largest half-width, relative to `1/d`, before the branch is declared lost.
const BRACKET_MAX: f64 = 0.25;

/// Continues the fixed point in `b` across an ascending grid, warm-starting
/// each bisection in a small bracket around the previous solution.
pub fn continue_branch(p: &ModelParams, b_grid: &[f64]) -> Result<Branch> {
    if b_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("b grid must be strictly ascending"));
    }
    let mut branch = Branch {
        b_values: Vec::with_capacity(b_grid.len()),
        z_values: Vec::with_capacity(b_grid.len()),
        terminated: false,
    };
    let zb = p.z_bound();
    let mut prev: Option<f64> = None;
    for &b in b_grid {
        let q = p.with_b(b)?;
        let z = match prev {
            None => {
                let fps = find_fixed_points(&q);
                let nearest = fps
                    .iter()
                    .map(|e| e.z_hat)
                    .min_by(|x, y| x.abs().total_cmp(&y.abs()));
                match nearest {
                    Some(z) => z,
                    None => {
                        branch.terminated = true;
                        break;
                    }
                }
            }
            Some(z0) => {
                let mut w = BRACKET_START * zb;
                let mut found = None;
                while w <= BRACKET_MAX * zb {
                    let lo = (z0 - w).max(-zb);
                    let hi = (z0 + w).min(zb);
                    if residual_h(lo, &q) * residual_h(hi, &q) <= 0.0 {
                        found = Some(bisect(lo, hi, &q));
                        break;
                    }
                    w *= 2.0;
                }
                match found {
                    Some(z) => z,
                    None => {
                        branch.terminated = true;
                        break;
                    }
                }
            }
        };
        branch.b_values.push(b);
        branch.z_values.push(z);
        prev = Some(z);
    }
    Ok(branch)
}
