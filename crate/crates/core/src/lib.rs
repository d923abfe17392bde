//! Numerical core for the spiking nonlinear opinion dynamics (S-NOD) model
//!
//! ```text
//! ż = −d z + tanh((k z² + μ0 − s) a z + b)
//! ṡ = ε (−s + k_s z⁴)
//! ```
//!
//! Everything here is a pure function of its inputs and builds without `std`
//! (an allocator is required for trajectories and root lists). File formats,
//! parallel sweeps and the command-line front end live in `snod-lab`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod bifurcation;
pub mod equilibria;
mod error;
pub mod geometry;
pub mod model;
pub mod simulate;

pub use crate::algebra::{
    classify_regime, cubic_real_roots, thm3_condition, CubicStationaryPoints, DetCoeffs, Regime,
    TraceCoeffs,
};
pub use crate::bifurcation::{
    input_thresholds, pitchfork_mu0, threshold_curve, trace_roots_z, ThresholdCurve,
    ThresholdReport,
};
pub use crate::equilibria::{
    classify, continue_branch, find_fixed_points, Branch, Equilibrium, Stability,
};
pub use crate::error::{Error, Result};
pub use crate::geometry::{fold_points, singular_period, z_nullcline, FoldPoints, NullclineSample};
pub use crate::model::{Derivative, Jacobian, ModelParams, State};
pub use crate::simulate::{
    bounding_box, detect_spikes, integrate, limit_cycle_envelope, BoundingBox, Envelope,
    IntegratorConfig, SpikeDetector, SpikeMetrics, Trajectory,
};
