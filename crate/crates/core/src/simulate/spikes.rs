//! Spike detection on a sampled trajectory.
//!
//! Thresholds are placed relative to the post-transient envelope of the
//! orbit itself: an onset is an upward crossing (in the direction of the
//! spike polarity) of the envelope midline, re-armed once the orbit falls back
//! into the lowest fifth of the envelope. An orbit whose late-window
//! amplitude stays below `min_amplitude` is resting.

use alloc::vec::Vec;

use libm::sqrt;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeDetector {
    pub t_transient: f64,
    /// Late-window peak-to-peak amplitude below which the orbit is at rest.
    pub min_amplitude: f64,
    /// Onset level as a fraction of the envelope, measured from the trough.
    pub on_fraction: f64,
    /// Re-arm level as a fraction of the envelope.
    pub off_fraction: f64,
}

impl SpikeDetector {
    /// Transient `10/ε`, amplitude floor `0.05/d`, levels at 50% and 20%.
    pub fn for_params(p: &ModelParams) -> Self {
        Self {
            t_transient: 10.0 / p.eps(),
            min_amplitude: 0.05 / p.d(),
            on_fraction: 0.5,
            off_fraction: 0.2,
        }
    }

    pub fn with_transient(mut self, t_transient: f64) -> Self {
        self.t_transient = t_transient;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeMetrics {
    pub spike_times: Vec<f64>,
    /// Mean inter-spike interval; `None` with fewer than two spikes.
    pub period: Option<f64>,
    /// `1/period`, or 0 when the orbit rests or spikes fewer than twice.
    pub frequency: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// At least two intervals with coefficient of variation below 0.02.
    pub periodic: bool,
    /// +1 or −1 for spiking orbits, 0 at rest.
    pub polarity: i8,
}

impl SpikeMetrics {
    pub fn amplitude(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn is_spiking(&self) -> bool {
        self.frequency > 0.0
    }
}

const PERIODIC_CV: f64 = 0.02;

pub fn detect_spikes(traj: &Trajectory, det: &SpikeDetector) -> Result<SpikeMetrics> {
    let t_end = traj.t_end();
    let too_short = Error::TooShort {
        span: t_end,
        required: det.t_transient,
    };
    if t_end <= det.t_transient {
        return Err(too_short);
    }
    let start = traj.times.partition_point(|&t| t < det.t_transient);
    let times = &traj.times[start..];
    let zs: Vec<f64> = traj.states[start..].iter().map(|x| x.z).collect();
    if zs.len() < 2 {
        return Err(too_short);
    }

    let (z_min, z_max) = min_max(&zs);
    let late_start = times.partition_point(|&t| t < 0.5 * (det.t_transient + t_end));
    let (late_min, late_max) = min_max(&zs[late_start.min(zs.len() - 1)..]);

    let resting = SpikeMetrics {
        spike_times: Vec::new(),
        period: None,
        frequency: 0.0,
        z_min,
        z_max,
        periodic: false,
        polarity: 0,
    };
    if late_max - late_min < det.min_amplitude {
        return Ok(resting);
    }

    let polarity: i8 = if z_max.abs() >= z_min.abs() { 1 } else { -1 };
    let sign = f64::from(polarity);
    let trough = if polarity > 0 { z_min } else { -z_max };
    let amp = z_max - z_min;
    let on = trough + det.on_fraction * amp;
    let off = trough + det.off_fraction * amp;

    let mut spike_times = Vec::new();
    let mut armed = sign * zs[0] < on;
    for i in 1..zs.len() {
        let (u0, u1) = (sign * zs[i - 1], sign * zs[i]);
        if armed && u0 < on && u1 >= on {
            let frac = (on - u0) / (u1 - u0);
            spike_times.push(times[i - 1] + frac * (times[i] - times[i - 1]));
            armed = false;
        } else if !armed && u1 < off {
            armed = true;
        }
    }

    let intervals: Vec<f64> = spike_times.windows(2).map(|w| w[1] - w[0]).collect();
    let period =
        (!intervals.is_empty()).then(|| intervals.iter().sum::<f64>() / intervals.len() as f64);
    let periodic = match period {
        Some(mean) if intervals.len() >= 2 => {
            let var = intervals
                .iter()
                .map(|x| (x - mean) * (x - mean))
                .sum::<f64>()
                / (intervals.len() - 1) as f64;
            sqrt(var) / mean < PERIODIC_CV
        }
        _ => false,
    };
    Ok(SpikeMetrics {
        spike_times,
        period,
        frequency: period.map_or(0.0, |t| 1.0 / t),
        z_min,
        z_max,
        periodic,
        polarity,
    })
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}
