//! Minimal SVG line charts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{usage, Result};
use crate::eval::SweepOutput;
use crate::params::Param;
use crate::spec::{ChartSpec, SweepSpec};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// A labelled polyline in data coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Groups rows into curves: one per series, combination of the axes other
/// than `along`, and y column. Points unusable on a log axis are dropped.
pub fn curves(out: &SweepOutput, spec: &SweepSpec, chart: &ChartSpec) -> Result<Vec<Curve>> {
    let columns = out.columns();
    for c in std::iter::once(&chart.x).chain(&chart.y) {
        if !columns.contains(c) {
            return Err(usage(format!("chart column '{c}' is not in the output")));
        }
    }
    let along = chart.along.or_else(|| spec.axes.first().map(|a| a.param));
    let splitters: Vec<Param> = spec
        .axes
        .iter()
        .map(|a| a.param)
        .filter(|p| Some(*p) != along)
        .collect();
    let mut groups: BTreeMap<(usize, String), Curve> = BTreeMap::new();
    let mut order = 0usize;
    let mut first_seen: BTreeMap<String, usize> = BTreeMap::new();
    for row in &out.rows {
        let split: Vec<String> = splitters
            .iter()
            .filter_map(|&p| row.point.value(p).map(|v| format!("{p}={v}")))
            .collect();
        for y in &chart.y {
            let mut label = row.series.clone();
            if !split.is_empty() {
                label = format!("{label} {}", split.join(" "));
            }
            if chart.y.len() > 1 {
                label = format!("{label} {y}");
            }
            let rank = *first_seen.entry(label.clone()).or_insert_with(|| {
                order += 1;
                order
            });
            let (Some(xv), Some(yv)) = (out.value(row, &chart.x), out.value(row, y)) else {
                continue;
            };
            let usable = |v: f64, log: bool| v.is_finite() && (!log || v > 0.0);
            if usable(xv, chart.x_log) && usable(yv, chart.y_log) {
                groups
                    .entry((rank, label.clone()))
                    .or_insert_with(|| Curve { label, points: vec![] })
                    .points
                    .push((xv, yv));
            }
        }
    }
    Ok(groups.into_values().collect())
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let span = (self.hi - self.lo).round() as i64;
            let step = (span / 8).max(1);
            (self.lo as i64..=self.hi as i64)
                .step_by(step as usize)
                .map(|e| (10f64.powi(e as i32), format!("1e{e}")))
                .collect()
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, tick_label(v))
                })
                .collect()
        }
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-2..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders curves as a standalone SVG document.
pub fn render_svg(curves: &[Curve], chart: &ChartSpec) -> String {
    let xs = Scale::new(curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)), chart.x_log);
    let ys = Scale::new(curves.iter().flat_map(|c| c.points.iter().map(|p| p.1)), chart.y_log);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + xs.unit(v) * pw;
    let py = |v: f64| TOP + (1.0 - ys.unit(v)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, label) in xs.ticks() {
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            TOP + ph + 18.0
        );
    }
    for (v, label) in ys.ticks() {
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(&chart.x)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&chart.y.join(", "))
    );
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the sweep's chart for `out`.
pub fn emit_chart<W: Write>(out: &SweepOutput, spec: &SweepSpec, mut writer: W) -> Result<()> {
    let chart = spec
        .chart
        .as_ref()
        .ok_or_else(|| usage("this sweep has no chart mapping; give --chart-x and --chart-y"))?;
    if out.rows.is_empty() {
        return Err(usage("nothing to chart"));
    }
    let c = curves(out, spec, chart)?;
    writer.write_all(render_svg(&c, chart).as_bytes())?;
    writer.flush()?;
    Ok(())
}
