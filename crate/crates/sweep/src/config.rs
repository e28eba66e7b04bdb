//! TOML sweep files.
//!
//! ```toml
//! name = "density"
//! methods = ["exact", "linearized"]
//! delay = false
//!
//! [[series]]
//! label = "dsa"
//! scenario = "dsa"
//! fixed = { w_p = 1.4, n = 200, r = 0.1 }
//!
//! [[axes]]
//! param = "lambda"
//! grid = { log = { start = 1e-5, stop = 1e-1, count = 30 } }
//!
//! [mc]
//! samples = 100000
//! seed = 7
//!
//! [output]
//! path = "density.csv"
//! format = "both"
//!
//! [chart]
//! x = "lambda"
//! y = ["eps_exact"]
//! x_log = true
//! y_log = true
//! ```

use std::path::Path;

use crate::error::{Result, SweepError};
use crate::spec::SweepSpec;

pub fn parse_config(text: &str) -> Result<SweepSpec> {
    toml::from_str(text).map_err(|e| SweepError::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
