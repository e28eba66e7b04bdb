//! Outage probability, reliability and delay of short-blocklength links in
//! Poisson fields of Rayleigh-faded interferers.
//!
//! The math is generic over the scalar type through [`Real`]; the `*64`
//! aliases at the crate root fix it to `f64`, which is what the Monte Carlo
//! and CLI layers use.
//!
//! Module map:
//! - [`numerics`]: special functions, adaptive quadrature, root finding and
//!   reproducible random streams.
//! - [`sinr`]: the SINR law of the reference link (CDF, PDF, quantile).
//! - [`outage`]: finite-blocklength outage: exact, linearized and closed forms.
//! - [`spatial`]: spatial Monte Carlo ground truth.
//! - [`harq`]: Type-I ARQ outage and delay accounting.

// `!(x > 0)` comparisons are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod harq;
pub mod numerics;
pub mod outage;
pub mod real;
pub mod sinr;
pub mod spatial;

pub use error::{Error, Result};
pub use harq::{ArqConfig, BudgetOutcome, DelayReport};
pub use numerics::{QuadratureOptions, QuadratureResult, RandomStream, SeedSpec};
pub use outage::{CodeParams, Method, MethodChoice, OutageEstimate};
pub use real::Real;
pub use sinr::SinrParams;
pub use spatial::{EmpiricalDistribution, FarField, FieldConfig, RadiusPolicy};

pub type SinrParams64 = SinrParams<f64>;
pub type CodeParams64 = CodeParams<f64>;
pub type OutageEstimate64 = OutageEstimate<f64>;
pub type QuadratureResult64 = QuadratureResult<f64>;
pub type ArqConfig64 = ArqConfig<f64>;
pub type DelayReport64 = DelayReport<f64>;

pub type SinrParams32 = SinrParams<f32>;
pub type CodeParams32 = CodeParams<f32>;
