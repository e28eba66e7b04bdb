//! Experiment harness over `fbl-core`: declarative sweeps, figure presets,
//! Monte Carlo validation, CSV and SVG output. The `fbl` binary is a thin
//! command-line layer over this library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod config;
pub mod error;
pub mod eval;
pub mod output;
pub mod params;
pub mod presets;
pub mod spec;
pub mod validate;

pub use chart::emit_chart;
pub use error::{Result, SweepError};
pub use eval::{run_sweep, ResultRow, SweepOutput};
pub use output::emit_csv;
pub use params::{Axis, Grid, Param, Point, Scenario};
pub use presets::figure_preset;
pub use spec::{MethodSel, Series, SweepSpec};
pub use validate::{mc_validate, ValidationReport, ValidationSettings};
