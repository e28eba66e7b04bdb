//! Pointwise evaluation of a sweep and the result table.

use fbl_core::harq::{arq_outage, expected_delay, worst_case_delay, ArqConfig};
use fbl_core::outage::{outage, CodeParams, Method, MethodChoice, OutageEstimate};
use fbl_core::spatial::{collect_samples, empirical_outage, FarField, FieldConfig, RadiusPolicy};
use fbl_core::{SeedSpec, SinrParams};
use rayon::prelude::*;

use crate::error::{Result, SweepError};
use crate::params::{Param, Point};
use crate::spec::{MethodSel, PointSpec, SweepSpec};

/// ARQ figures derived from the first method's outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayColumns {
    pub arq_outage: f64,
    pub channel_uses: u64,
    pub delay_ms: f64,
    pub expected_channel_uses: f64,
    pub reliability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub index: usize,
    pub series: String,
    pub point: Point,
    pub xi: f64,
    /// One per requested method, in request order.
    pub estimates: Vec<OutageEstimate<f64>>,
    pub clamped_rho: bool,
    pub delay: Option<DelayColumns>,
}

/// A point that produced no row.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEntry {
    pub index: usize,
    pub series: String,
    pub point: Point,
    pub class: &'static str,
    pub message: String,
}

impl ErrorEntry {
    /// One log line: position, parameters, error class, message.
    pub fn log_line(&self) -> String {
        format!(
            "index={} series={} {} class={} message={:?}",
            self.index,
            self.series,
            self.point.describe(),
            self.class,
            self.message
        )
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Real(f64),
    Flag(bool),
    Empty,
}

impl Cell {
    /// Nine significant digits for reals, plain integers, 0/1 flags.
    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => format!("{v:.8e}"),
            Cell::Real(v) => v.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub methods: Vec<MethodSel>,
    pub delay: bool,
    pub rows: Vec<ResultRow>,
    pub errors: Vec<ErrorEntry>,
}

const INPUT_COLUMNS: [Param; 12] = Param::ALL;

impl SweepOutput {
    fn exact_position(&self) -> Option<usize> {
        self.methods
            .iter()
            .position(|m| *m == MethodSel::Fixed(Method::ExactQuadrature))
    }

    /// Column names, in the fixed order: series, inputs, ξ, per-method
    /// outage and error bound, relative deviations from the exact value,
    /// ρ clamp flag, then delay columns when requested.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["series".to_owned()];
        cols.extend(INPUT_COLUMNS.iter().map(|p| p.name().to_owned()));
        cols.push("xi".into());
        for m in &self.methods {
            cols.push(format!("eps_{m}"));
            cols.push(format!("err_{m}"));
            if *m == MethodSel::Auto {
                cols.push("method_auto".into());
            }
        }
        if let Some(e) = self.exact_position() {
            for (i, m) in self.methods.iter().enumerate() {
                if i != e {
                    cols.push(format!("delta_{m}"));
                }
            }
        }
        cols.push("clamped_rho".into());
        if self.delay {
            for c in [
                "arq_outage",
                "channel_uses",
                "delay_ms",
                "expected_channel_uses",
                "reliability",
            ] {
                cols.push(c.into());
            }
        }
        cols
    }

    pub fn cells(&self, row: &ResultRow) -> Vec<Cell> {
        let mut cells = vec![Cell::Text(row.series.clone())];
        for p in INPUT_COLUMNS {
            cells.push(match (p.is_integer(), row.point.value(p)) {
                (_, None) => Cell::Empty,
                (true, Some(v)) => Cell::Int(v as u64),
                (false, Some(v)) => Cell::Real(v),
            });
        }
        cells.push(Cell::Real(row.xi));
        for (m, e) in self.methods.iter().zip(&row.estimates) {
            cells.push(Cell::Real(e.value));
            cells.push(Cell::Real(e.error_bound));
            if *m == MethodSel::Auto {
                cells.push(Cell::Text(e.method.label().into()));
            }
        }
        if let Some(ei) = self.exact_position() {
            let exact = row.estimates[ei].value;
            for (i, e) in row.estimates.iter().enumerate() {
                if i != ei {
                    cells.push(if exact > 0.0 {
                        Cell::Real(((exact - e.value) / exact).abs())
                    } else {
                        Cell::Empty
                    });
                }
            }
        }
        cells.push(Cell::Flag(row.clamped_rho));
        if self.delay {
            match row.delay {
                Some(d) => cells.extend([
                    Cell::Real(d.arq_outage),
                    Cell::Int(d.channel_uses),
                    Cell::Real(d.delay_ms),
                    Cell::Real(d.expected_channel_uses),
                    Cell::Real(d.reliability),
                ]),
                None => cells.extend(std::iter::repeat_n(Cell::Empty, 5)),
            }
        }
        cells
    }

    /// Numeric value of a named column, if the row has one.
    pub fn value(&self, row: &ResultRow, column: &str) -> Option<f64> {
        let idx = self.columns().iter().position(|c| c == column)?;
        match &self.cells(row)[idx] {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Flag(b) => Some(f64::from(u8::from(*b))),
            _ => None,
        }
    }

    /// Fails when nothing at all could be evaluated.
    pub fn ensure_rows(&self) -> Result<()> {
        if self.rows.is_empty() && !self.errors.is_empty() {
            Err(SweepError::AllRowsFailed(self.errors.len()))
        } else {
            Ok(())
        }
    }
}

fn estimate(
    sel: MethodSel,
    index: usize,
    p: &SinrParams<f64>,
    c: &CodeParams<f64>,
    spec: &SweepSpec,
) -> fbl_core::Result<OutageEstimate<f64>> {
    match sel {
        MethodSel::Auto => outage(p, c, MethodChoice::Auto),
        MethodSel::Fixed(Method::MonteCarlo) => {
            let mc = spec.mc.unwrap_or_default();
            let cfg = FieldConfig::configure(
                *p,
                mc.samples,
                SeedSpec::new(mc.seed, index as u64),
                RadiusPolicy::CdfBias {
                    tolerance: mc.bias_tolerance,
                },
                FarField::MeanField,
            )?;
            empirical_outage(&collect_samples(&cfg), c)
        }
        MethodSel::Fixed(m) => outage(p, c, MethodChoice::Forced(m)),
    }
}

#[allow(clippy::result_large_err)]
fn evaluate(spec: &SweepSpec, ps: &PointSpec, point: Point) -> std::result::Result<ResultRow, ErrorEntry> {
    let series = spec.series[ps.series].label.clone();
    let run = || -> fbl_core::Result<ResultRow> {
        let p = SinrParams::new(point.alpha, point.lambda, point.d, point.w_p, point.w_s, point.eta)?;
        let c = match point.k {
            Some(k) => CodeParams::from_bits(point.n, k)?,
            None => CodeParams::from_rate(point.n, point.r)?,
        };
        let estimates = spec
            .methods
            .iter()
            .map(|&m| estimate(m, ps.index, &p, &c, spec))
            .collect::<fbl_core::Result<Vec<_>>>()?;
        let delay = if spec.delay {
            let cfg = ArqConfig::new(point.m, point.nu, point.symbol_time)?;
            let eps = estimates[0].value;
            let arq = arq_outage(eps, point.m)?;
            let worst = worst_case_delay(&cfg, point.n);
            let expected = expected_delay(eps, &cfg, point.n)?;
            Some(DelayColumns {
                arq_outage: arq,
                channel_uses: worst.channel_uses as u64,
                delay_ms: worst.millis(),
                expected_channel_uses: expected.channel_uses,
                reliability: 1.0 - arq,
            })
        } else {
            None
        };
        Ok(ResultRow {
            index: ps.index,
            series: series.clone(),
            point,
            xi: p.xi(),
            estimates,
            clamped_rho: c.rho_is_clamped(),
            delay,
        })
    };
    run().map_err(|e| ErrorEntry {
        index: ps.index,
        series: series.clone(),
        point,
        class: e.class(),
        message: e.to_string(),
    })
}

/// Evaluates every point in parallel; rows come back in point order.
/// Points whose parameters break a scenario rule fail the whole sweep;
/// evaluation failures become error entries.
#[allow(clippy::result_large_err)]
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let points = spec.points()?;
    let resolved: Vec<(PointSpec, Point)> = points
        .into_iter()
        .map(|ps| spec.resolve(&ps).map(|p| (ps, p)))
        .collect::<Result<_>>()?;
    let outcomes: Vec<_> = resolved
        .par_iter()
        .map(|(ps, point)| evaluate(spec, ps, *point))
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(e) => errors.push(e),
        }
    }
    Ok(SweepOutput {
        methods: spec.methods.clone(),
        delay: spec.delay,
        rows,
        errors,
    })
}
