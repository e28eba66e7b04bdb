//! Sweepable parameters, value grids and resolved evaluation points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Parameter names accepted by axes, fixed maps and CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    Lambda,
    D,
    #[serde(alias = "wp")]
    WP,
    #[serde(alias = "ws")]
    WS,
    Eta,
    N,
    K,
    #[serde(alias = "rate")]
    R,
    M,
    Nu,
    SymbolTime,
}

impl Param {
    pub const ALL: [Param; 12] = [
        Param::Alpha,
        Param::Lambda,
        Param::D,
        Param::WP,
        Param::WS,
        Param::Eta,
        Param::N,
        Param::K,
        Param::R,
        Param::M,
        Param::Nu,
        Param::SymbolTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Lambda => "lambda",
            Param::D => "d",
            Param::WP => "w_p",
            Param::WS => "w_s",
            Param::Eta => "eta",
            Param::N => "n",
            Param::K => "k",
            Param::R => "r",
            Param::M => "m",
            Param::Nu => "nu",
            Param::SymbolTime => "symbol_time",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Param::N | Param::K | Param::M | Param::Nu)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = crate::error::SweepError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "wp" => Some(Param::WP),
            "ws" => Some(Param::WS),
            "rate" => Some(Param::R),
            _ => None,
        };
        alias
            .or_else(|| Param::ALL.iter().copied().find(|p| p.name() == key))
            .ok_or_else(|| usage(format!("unknown parameter '{s}'")))
    }
}

/// Values taken by one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    List(Vec<f64>),
    Lin { start: f64, stop: f64, count: usize },
    Log { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Grid::List(vec![v])
    }

    /// Grid values, endpoints exact. Empty or ill-formed grids are errors.
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Lin { start, stop, count } => spaced(start, stop, count, |t| t, |t| t),
            Grid::Log { start, stop, count } => {
                if !(start > 0.0 && stop > 0.0) {
                    return Err(usage(format!("log grid needs positive bounds, got {start}..{stop}")));
                }
                spaced(start, stop, count, f64::log10, |t| 10f64.powf(t))
            }
        };
        if values.is_empty() {
            return Err(usage("empty value grid"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(usage(format!("grid value {bad} is not finite")));
        }
        Ok(values)
    }
}

fn spaced(start: f64, stop: f64, count: usize, to: fn(f64) -> f64, from: fn(f64) -> f64) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let (a, b) = (to(start), to(stop));
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => start,
                    i if i == count - 1 => stop,
                    i => from(a + step * i as f64),
                })
                .collect()
        }
    }
}

impl FromStr for Grid {
    type Err = crate::error::SweepError;

    /// `v`, `v1,v2,...`, `lin:start:stop:count` or `log:start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("'{t}' is not a number in grid '{s}'")))
        };
        if let Some((kind, rest)) = s.split_once(':') {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(usage(format!("range grid '{s}' needs start:stop:count")));
            }
            let start = number(parts[0])?;
            let stop = number(parts[1])?;
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("grid count '{}' is not an integer", parts[2])))?;
            return match kind.trim().to_ascii_lowercase().as_str() {
                "lin" => Ok(Grid::Lin { start, stop, count }),
                "log" => Ok(Grid::Log { start, stop, count }),
                other => Err(usage(format!("unknown grid kind '{other}'"))),
            };
        }
        if s.is_empty() {
            return Err(usage("empty value grid"));
        }
        s.split(',').map(number).collect::<Result<Vec<_>>>().map(Grid::List)
    }
}

/// A parameter and the grid it runs over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub grid: Grid,
}

/// Which law the fixed values describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Interference-limited: η is forced to 0.
    #[serde(alias = "dsa")]
    DynamicSpectrumAccess,
    /// η > 0, defaulting to ξ = 0.001.
    #[serde(alias = "uo", alias = "micro_op")]
    MicroOperator,
    #[default]
    Custom,
}

impl FromStr for Scenario {
    type Err = crate::error::SweepError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dsa" | "dynamic_spectrum_access" => Ok(Scenario::DynamicSpectrumAccess),
            "uo" | "micro_op" | "micro_operator" => Ok(Scenario::MicroOperator),
            "custom" => Ok(Scenario::Custom),
            _ => Err(usage(format!("unknown scenario '{s}'"))),
        }
    }
}

/// Noise-to-signal level ξ used when a micro-operator point gives no η.
pub const MICRO_OPERATOR_XI: f64 = 1e-3;
pub const DEFAULT_SYMBOL_TIME: f64 = 8.3e-6;

/// Every input of one evaluation, defaults applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub alpha: f64,
    pub lambda: f64,
    pub d: f64,
    pub w_p: f64,
    pub w_s: f64,
    pub eta: f64,
    pub n: u64,
    pub k: Option<u64>,
    pub r: f64,
    pub m: u32,
    pub nu: u64,
    pub symbol_time: f64,
}

fn integer(p: Param, v: f64) -> Result<u64> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(usage(format!("{p} must be a nonnegative integer, got {v}")))
    }
}

impl Point {
    /// Applies scenario rules and defaults to explicitly given values.
    pub fn resolve(scenario: Scenario, given: &BTreeMap<Param, f64>) -> Result<Self> {
        let get = |p: Param, default: f64| given.get(&p).copied().unwrap_or(default);
        let lambda = *given.get(&Param::Lambda).ok_or_else(|| usage("lambda must be given"))?;
        let alpha = get(Param::Alpha, 4.0);
        let d = get(Param::D, 1.0);
        let w_s = get(Param::WS, 1.0);
        let eta = match (scenario, given.get(&Param::Eta)) {
            (Scenario::DynamicSpectrumAccess, Some(&e)) if e != 0.0 => {
                return Err(usage(format!(
                    "the dynamic spectrum access scenario is interference-limited; eta must be 0, got {e}"
                )))
            }
            (Scenario::DynamicSpectrumAccess, _) => 0.0,
            (Scenario::MicroOperator, Some(&e)) if !(e > 0.0) => {
                return Err(usage(format!("the micro-operator scenario needs eta > 0, got {e}")))
            }
            (Scenario::MicroOperator, Some(&e)) => e,
            (Scenario::MicroOperator, None) => MICRO_OPERATOR_XI * w_s / d.powf(alpha),
            (Scenario::Custom, e) => e.copied().unwrap_or(0.0),
        };
        let n = integer(Param::N, get(Param::N, 200.0))?;
        let k = given.get(&Param::K).map(|&v| integer(Param::K, v)).transpose()?;
        let r = match (k, given.get(&Param::R)) {
            (Some(_), Some(_)) => return Err(usage("give either k or r, not both")),
            (Some(k), None) => k as f64 / n.max(1) as f64,
            (None, r) => r.copied().unwrap_or(0.1),
        };
        let m = integer(Param::M, get(Param::M, 1.0))? as u32;
        Ok(Self {
            alpha,
            lambda,
            d,
            w_p: get(Param::WP, 1.0),
            w_s,
            eta,
            n,
            k,
            r,
            m,
            nu: integer(Param::Nu, get(Param::Nu, 0.0))?,
            symbol_time: get(Param::SymbolTime, DEFAULT_SYMBOL_TIME),
        })
    }

    pub fn value(&self, p: Param) -> Option<f64> {
        Some(match p {
            Param::Alpha => self.alpha,
            Param::Lambda => self.lambda,
            Param::D => self.d,
            Param::WP => self.w_p,
            Param::WS => self.w_s,
            Param::Eta => self.eta,
            Param::N => self.n as f64,
            Param::K => return self.k.map(|k| k as f64),
            Param::R => self.r,
            Param::M => f64::from(self.m),
            Param::Nu => self.nu as f64,
            Param::SymbolTime => self.symbol_time,
        })
    }

    /// Compact `name=value` listing for error logs.
    pub fn describe(&self) -> String {
        Param::ALL
            .iter()
            .filter_map(|&p| self.value(p).map(|v| format!("{p}={v}")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!("0.5".parse::<Grid>().unwrap().values().unwrap(), vec![0.5]);
        assert_eq!("1,2,3".parse::<Grid>().unwrap().values().unwrap(), vec![1.0, 2.0, 3.0]);
        let log = "log:1e-5:1e-1:5".parse::<Grid>().unwrap().values().unwrap();
        assert_eq!(log.len(), 5);
        assert_eq!(log[0], 1e-5);
        assert_eq!(log[4], 1e-1);
        assert!((log[2] - 1e-3).abs() < 1e-15);
        let lin = "lin:0:1:3".parse::<Grid>().unwrap().values().unwrap();
        assert_eq!(lin, vec![0.0, 0.5, 1.0]);
        assert!("log:0:1:3".parse::<Grid>().unwrap().values().is_err());
        assert!("lin:0:1:0".parse::<Grid>().unwrap().values().is_err());
        assert!(Grid::List(vec![]).values().is_err());
        assert!("".parse::<Grid>().is_err());
        assert!("cube:1:2:3".parse::<Grid>().is_err());
        assert!("1,x".parse::<Grid>().is_err());
    }

    #[test]
    fn param_names() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert_eq!("wp".parse::<Param>().unwrap(), Param::WP);
        assert_eq!("symbol-time".parse::<Param>().unwrap(), Param::SymbolTime);
        assert_eq!("rate".parse::<Param>().unwrap(), Param::R);
        assert!("xi".parse::<Param>().is_err());
    }

    fn given(pairs: &[(Param, f64)]) -> BTreeMap<Param, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn scenario_rules() {
        let dsa = Point::resolve(Scenario::DynamicSpectrumAccess, &given(&[(Param::Lambda, 0.01)])).unwrap();
        assert_eq!(dsa.eta, 0.0);
        assert_eq!((dsa.n, dsa.r, dsa.m), (200, 0.1, 1));
        assert!(Point::resolve(
            Scenario::DynamicSpectrumAccess,
            &given(&[(Param::Lambda, 0.01), (Param::Eta, 1.0)])
        )
        .is_err());
        let uo = Point::resolve(
            Scenario::MicroOperator,
            &given(&[(Param::Lambda, 0.01), (Param::D, 2.0), (Param::WS, 3.0)]),
        )
        .unwrap();
        assert!((uo.eta * 16.0 / 3.0 - 1e-3).abs() < 1e-18);
        assert!(Point::resolve(
            Scenario::MicroOperator,
            &given(&[(Param::Lambda, 0.01), (Param::Eta, 0.0)])
        )
        .is_err());
        assert!(Point::resolve(Scenario::Custom, &given(&[])).is_err());
    }

    #[test]
    fn bits_set_the_rate() {
        let p = Point::resolve(
            Scenario::Custom,
            &given(&[(Param::Lambda, 0.0), (Param::K, 50.0), (Param::N, 500.0)]),
        )
        .unwrap();
        assert_eq!(p.r, 0.1);
        assert_eq!(p.k, Some(50));
        assert!(Point::resolve(
            Scenario::Custom,
            &given(&[(Param::Lambda, 0.0), (Param::K, 50.0), (Param::R, 0.2)])
        )
        .is_err());
        assert!(Point::resolve(Scenario::Custom, &given(&[(Param::Lambda, 0.0), (Param::N, 10.5)])).is_err());
    }
}
