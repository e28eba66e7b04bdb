//! Monte Carlo validation of the analytic law at one operating point.

use std::fmt;

use fbl_core::outage::{approximation_error, outage_exact, outage_linearized, CodeParams, OutageEstimate};
use fbl_core::spatial::{
    collect_samples, empirical_outage, ks_critical_value, ks_statistic, EmpiricalDistribution, FarField, FieldConfig,
    RadiusPolicy,
};
use fbl_core::{SeedSpec, SinrParams};

use crate::error::{usage, Result};
use crate::params::Point;

pub const MIN_VALIDATION_SAMPLES: usize = 1000;

/// Thresholds and sampling settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationSettings {
    pub samples: usize,
    pub seed: u64,
    /// Density used for the simulated field, as a multiple of the analytic
    /// one. Anything but 1 is a negative control.
    pub generate_lambda_scale: f64,
    /// Largest accepted `|MC − exact|` in units of the MC error bound.
    pub max_error_bounds: f64,
    /// Largest accepted linearization deviation; reported only when `None`.
    pub max_delta: Option<f64>,
    pub bias_tolerance: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
            generate_lambda_scale: 1.0,
            max_error_bounds: 2.0,
            max_delta: None,
            bias_tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub point: Point,
    pub radius: f64,
    pub mean_interferers: f64,
    pub bias_bound: f64,
    pub ks: f64,
    pub ks_critical: f64,
    pub monte_carlo: OutageEstimate<f64>,
    pub exact: OutageEstimate<f64>,
    pub linearized: OutageEstimate<f64>,
    /// `(MC − exact)` in standard errors.
    pub z_score: f64,
    pub delta: Option<f64>,
    pub settings: ValidationSettings,
    pub samples: EmpiricalDistribution<f64>,
}

impl ValidationReport {
    pub fn ks_pass(&self) -> bool {
        self.ks <= self.ks_critical
    }

    pub fn outage_pass(&self) -> bool {
        (self.monte_carlo.value - self.exact.value).abs()
            <= self.settings.max_error_bounds * self.monte_carlo.error_bound
    }

    pub fn delta_pass(&self) -> Option<bool> {
        self.settings
            .max_delta
            .map(|limit| self.delta.is_some_and(|d| d <= limit))
    }

    pub fn pass(&self) -> bool {
        self.ks_pass() && self.outage_pass() && self.delta_pass().unwrap_or(true)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "point: {}", self.point.describe())?;
        writeln!(
            f,
            "field: samples={} seed={} lambda_scale={} radius={:.6e} mean_interferers={:.6e} cdf_bias_bound={:.3e}",
            self.samples.count(),
            self.settings.seed,
            self.settings.generate_lambda_scale,
            self.radius,
            self.mean_interferers,
            self.bias_bound
        )?;
        writeln!(
            f,
            "ks: statistic={:.6e} critical={:.6e} {}",
            self.ks,
            self.ks_critical,
            verdict(self.ks_pass())
        )?;
        writeln!(
            f,
            "outage: monte_carlo={:.8e} error_bound={:.3e} exact={:.8e} z={:+.3} {}",
            self.monte_carlo.value,
            self.monte_carlo.error_bound,
            self.exact.value,
            self.z_score,
            verdict(self.outage_pass())
        )?;
        let delta = self.delta.map_or("undefined".to_owned(), |d| format!("{d:.6e}"));
        let gate = self.delta_pass().map_or("reported", verdict);
        writeln!(
            f,
            "linearized: value={:.8e} delta={delta} {gate}",
            self.linearized.value
        )?;
        writeln!(f, "status: {}", verdict(self.pass()))
    }
}

/// Simulates the field at `point` and compares it with the analytic law.
pub fn mc_validate(point: &Point, settings: &ValidationSettings) -> Result<ValidationReport> {
    if settings.samples < MIN_VALIDATION_SAMPLES {
        return Err(usage(format!(
            "validation needs at least {MIN_VALIDATION_SAMPLES} samples, got {}",
            settings.samples
        )));
    }
    if !(settings.generate_lambda_scale >= 0.0 && settings.generate_lambda_scale.is_finite()) {
        return Err(usage("lambda scale must be a nonnegative number"));
    }
    let analytic = SinrParams::new(point.alpha, point.lambda, point.d, point.w_p, point.w_s, point.eta)?;
    let generating = analytic.with_lambda(point.lambda * settings.generate_lambda_scale)?;
    let code = match point.k {
        Some(k) => CodeParams::from_bits(point.n, k)?,
        None => CodeParams::from_rate(point.n, point.r)?,
    };
    let cfg = FieldConfig::configure(
        generating,
        settings.samples,
        SeedSpec::new(settings.seed, 0),
        RadiusPolicy::CdfBias {
            tolerance: settings.bias_tolerance,
        },
        FarField::MeanField,
    )?;
    let samples = collect_samples(&cfg);
    let monte_carlo = empirical_outage(&samples, &code)?;
    let exact = outage_exact(&analytic, &code)?;
    let linearized = outage_linearized(&analytic, &code)?;
    let standard_error = monte_carlo.error_bound / 2.0;
    let z_score = if standard_error > 0.0 {
        (monte_carlo.value - exact.value) / standard_error
    } else {
        0.0
    };
    Ok(ValidationReport {
        point: *point,
        radius: cfg.radius(),
        mean_interferers: cfg.mean_interferers(),
        bias_bound: cfg.bias_bound(),
        ks: ks_statistic(&samples, &analytic)?,
        ks_critical: ks_critical_value(samples.count()),
        delta: approximation_error(&exact, &linearized).ok(),
        monte_carlo,
        exact,
        linearized,
        z_score,
        settings: *settings,
        samples,
    })
}
