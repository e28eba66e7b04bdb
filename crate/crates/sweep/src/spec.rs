//! Declarative description of a sweep.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fbl_core::outage::Method;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result, SweepError};
use crate::params::{Axis, Param, Point, Scenario};

/// An evaluation method column: a fixed method, or the cheapest analytic
/// method valid at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodSel {
    Auto,
    Fixed(Method),
}

impl MethodSel {
    pub fn label(self) -> &'static str {
        match self {
            MethodSel::Auto => "auto",
            MethodSel::Fixed(m) => m.label(),
        }
    }
}

impl fmt::Display for MethodSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodSel {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(MethodSel::Auto);
        }
        s.parse::<Method>()
            .map(MethodSel::Fixed)
            .map_err(|_| usage(format!("unknown method '{s}'")))
    }
}

impl TryFrom<String> for MethodSel {
    type Error = SweepError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodSel> for String {
    fn from(m: MethodSel) -> String {
        m.label().to_owned()
    }
}

/// One curve family: a scenario and the values it pins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, scenario: Scenario) -> Self {
        Self {
            label: label.into(),
            scenario,
            fixed: BTreeMap::new(),
        }
    }

    pub fn with(mut self, p: Param, v: f64) -> Self {
        self.fixed.insert(p, v);
        self
    }
}

/// Spatial Monte Carlo settings for the `monte_carlo` method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    /// Sup-distance bound between simulated and infinite-plane CDFs, used to
    /// size the simulation disc.
    #[serde(default = "default_bias_tolerance")]
    pub bias_tolerance: f64,
}

fn default_bias_tolerance() -> f64 {
    1e-5
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
            bias_tolerance: default_bias_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Svg,
    Both,
}

impl FromStr for Format {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "both" => Ok(Format::Both),
            _ => Err(usage(format!("unknown output format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    /// CSV path; the chart goes next to it with an `.svg` extension.
    /// Without a path CSV goes to standard output.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Which columns a chart draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    /// Column on the horizontal axis.
    pub x: String,
    /// Columns drawn against it, one curve per column and curve group.
    pub y: Vec<String>,
    /// Axis traced along each curve; the remaining axes split curves.
    /// Defaults to the first axis.
    #[serde(default)]
    pub along: Option<Param>,
    #[serde(default)]
    pub x_log: bool,
    #[serde(default)]
    pub y_log: bool,
    #[serde(default)]
    pub title: String,
}

/// A full sweep: series × Cartesian product of axes × methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub name: String,
    pub series: Vec<Series>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodSel>,
    /// Adds ARQ outage and delay columns based on the first method.
    #[serde(default)]
    pub delay: bool,
    #[serde(default)]
    pub mc: Option<McSettings>,
    /// Parameters that must be given by the user for every series.
    #[serde(default)]
    pub required: Vec<Param>,
    #[serde(default)]
    pub chart: Option<ChartSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_methods() -> Vec<MethodSel> {
    vec![MethodSel::Auto]
}

/// One point of the sweep, before defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub index: usize,
    pub series: usize,
    pub given: BTreeMap<Param, f64>,
}

impl SweepSpec {
    pub fn new(name: impl Into<String>, series: Vec<Series>) -> Self {
        Self {
            name: name.into(),
            series,
            axes: vec![],
            methods: default_methods(),
            delay: false,
            mc: None,
            required: vec![],
            chart: None,
            output: OutputSpec::default(),
        }
    }

    /// Sets `p` to a single value everywhere, or turns it into an axis.
    /// Replaces any earlier fixed value or axis for `p`.
    pub fn set(&mut self, p: Param, values: Vec<f64>) {
        self.axes.retain(|a| a.param != p);
        for s in &mut self.series {
            s.fixed.remove(&p);
        }
        if values.len() == 1 {
            for s in &mut self.series {
                s.fixed.insert(p, values[0]);
            }
        } else {
            self.axes.push(Axis {
                param: p,
                grid: crate::params::Grid::List(values),
            });
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(usage("a sweep needs at least one series"));
        }
        if self.methods.is_empty() {
            return Err(usage("a sweep needs at least one method"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.methods {
            if !seen.insert(m.label()) {
                return Err(usage(format!("method '{m}' listed twice")));
            }
        }
        for (i, a) in self.axes.iter().enumerate() {
            a.grid.values()?;
            if self.axes[..i].iter().any(|b| b.param == a.param) {
                return Err(usage(format!("two axes over {}", a.param)));
            }
        }
        let uses_mc = self.methods.contains(&MethodSel::Fixed(Method::MonteCarlo));
        if uses_mc {
            let mc = self
                .mc
                .ok_or_else(|| usage("monte_carlo needs sample count and seed"))?;
            if mc.samples == 0 {
                return Err(usage("monte_carlo needs at least one sample"));
            }
        }
        for p in &self.required {
            let on_axis = self.axes.iter().any(|a| a.param == *p);
            if !on_axis && self.series.iter().any(|s| !s.fixed.contains_key(p)) {
                return Err(usage(format!(
                    "{} needs an explicit value for {p}",
                    if self.name.is_empty() { "this sweep" } else { &self.name }
                )));
            }
        }
        Ok(())
    }

    /// Points in output order: series, then axes lexicographically with the
    /// first axis varying slowest.
    pub fn points(&self) -> Result<Vec<PointSpec>> {
        let grids: Vec<Vec<f64>> = self.axes.iter().map(|a| a.grid.values()).collect::<Result<_>>()?;
        let combos: usize = grids.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(combos * self.series.len());
        for (si, s) in self.series.iter().enumerate() {
            for c in 0..combos {
                let mut given = s.fixed.clone();
                let mut rest = c;
                for (axis, grid) in self.axes.iter().zip(&grids).rev() {
                    given.insert(axis.param, grid[rest % grid.len()]);
                    rest /= grid.len();
                }
                out.push(PointSpec {
                    index: out.len(),
                    series: si,
                    given,
                });
            }
        }
        Ok(out)
    }

    pub fn resolve(&self, p: &PointSpec) -> Result<Point> {
        Point::resolve(self.series[p.series].scenario, &p.given)
    }
}
