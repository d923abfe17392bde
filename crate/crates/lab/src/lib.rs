//! Parameter sweeps, file formats and the `snod` command line for the
//! spiking nonlinear opinion dynamics model.
//!
//! The numerics live in [`snod_core`]; this crate adds parallel sweeps,
//! a JSON run configuration and CSV/JSON output.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod sweeps;

pub use snod_core as core;

pub use crate::config::{Grid, Purpose, RunConfig};
pub use crate::error::{LabError, LabResult};
pub use crate::sweeps::{
    diagram_in_b, diagram_in_mu0, fi_curve, frequency_heatmap, Diagram, DiagramRow, FiPoint,
    Heatmap, HeatmapCell, SimSettings,
};
