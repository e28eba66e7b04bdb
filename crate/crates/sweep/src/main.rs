use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fbl_core::harq::{
    arq_outage, expected_delay, max_attempts_within_budget, worst_case_delay, ArqConfig, BudgetOutcome,
};
use fbl_core::outage::{outage, CodeParams, MethodChoice};
use fbl_core::spatial::write_samples;
use fbl_core::SinrParams;
use fbl_sweep::error::{usage, Result, SweepError};
use fbl_sweep::output::emit_error_log;
use fbl_sweep::params::{Grid, Param, Point, Scenario};
use fbl_sweep::spec::{ChartSpec, Format, MethodSel, Series, SweepSpec};
use fbl_sweep::validate::{mc_validate, ValidationSettings};
use fbl_sweep::{emit_chart, emit_csv, figure_preset, run_sweep};

#[derive(Parser)]
#[command(
    name = "fbl",
    version,
    about = "Finite-blocklength outage in Poisson interference fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage at a single operating point.
    Outage(PointArgs),
    /// Outage over a grid of parameters.
    Sweep(SweepArgs),
    /// Run a figure preset.
    Figure(FigureArgs),
    /// Compare the spatial simulation with the analytic law.
    McValidate(ValidateArgs),
    /// Retransmission delay and reliability.
    Delay(DelayArgs),
    /// Print the version.
    Version,
}

/// Parameter flags. Each takes a value, a comma list, or
/// `lin:start:stop:count` / `log:start:stop:count`.
#[derive(Args, Default, Clone)]
struct ParamFlags {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    wp: Option<String>,
    #[arg(long)]
    ws: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    rate: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long = "symbol-time")]
    symbol_time: Option<String>,
}

impl ParamFlags {
    fn entries(&self) -> Vec<(Param, &str)> {
        [
            (Param::Alpha, &self.alpha),
            (Param::Lambda, &self.lambda),
            (Param::D, &self.d),
            (Param::WP, &self.wp),
            (Param::WS, &self.ws),
            (Param::Eta, &self.eta),
            (Param::N, &self.n),
            (Param::K, &self.k),
            (Param::R, &self.rate),
            (Param::M, &self.m),
            (Param::Nu, &self.nu),
            (Param::SymbolTime, &self.symbol_time),
        ]
        .into_iter()
        .filter_map(|(p, v)| v.as_deref().map(|v| (p, v)))
        .collect()
    }

    /// Flags as value lists.
    fn grids(&self) -> Result<Vec<(Param, Vec<f64>)>> {
        self.entries()
            .into_iter()
            .map(|(p, v)| Ok((p, v.parse::<Grid>()?.values()?)))
            .collect()
    }

    /// Flags as single values; lists are rejected.
    fn scalars(&self) -> Result<std::collections::BTreeMap<Param, f64>> {
        self.grids()?
            .into_iter()
            .map(|(p, v)| match v.as_slice() {
                [x] => Ok((p, *x)),
                _ => Err(usage(format!("--{p} takes a single value here"))),
            })
            .collect()
    }

    fn apply(&self, spec: &mut SweepSpec) -> Result<()> {
        for (p, values) in self.grids()? {
            spec.set(p, values);
        }
        Ok(())
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Output file; CSV goes to standard output without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, svg or both.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// dsa, uo or custom.
    #[arg(long, default_value = "custom")]
    scenario: String,
    /// Comma-separated methods: auto, exact, linearized, closed_ss,
    /// closed_ss_a4, closed_uo, monte_carlo.
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Add ARQ delay columns.
    #[arg(long)]
    delay: bool,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    delay: bool,
    /// Chart column for the horizontal axis.
    #[arg(long = "chart-x")]
    chart_x: Option<String>,
    /// Comma-separated chart columns for the vertical axis.
    #[arg(long = "chart-y")]
    chart_y: Option<String>,
    #[arg(long = "chart-log-x")]
    chart_log_x: bool,
    #[arg(long = "chart-log-y")]
    chart_log_y: bool,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2, fig4, fig5, fig6, fig7, fig8a, fig8b, fig9a, fig9b or fig10.
    id: String,
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long)]
    method: Option<String>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long, default_value = "custom")]
    scenario: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulate at this multiple of lambda (negative control).
    #[arg(long = "generate-lambda-scale", default_value_t = 1.0)]
    generate_lambda_scale: f64,
    /// Accepted |MC - exact| in MC error bounds.
    #[arg(long = "max-error-bounds", default_value_t = 2.0)]
    max_error_bounds: f64,
    /// Gate on the linearization deviation as well.
    #[arg(long = "max-delta")]
    max_delta: Option<f64>,
    /// Write the simulated SINR samples, one per line.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct DelayArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long, default_value = "custom")]
    scenario: String,
    /// Per-attempt outage; computed from the link flags when absent.
    #[arg(long)]
    eps: Option<f64>,
    /// Delay budget in milliseconds.
    #[arg(long = "budget-ms")]
    budget_ms: Option<f64>,
    /// Outage target checked against the budget's attempt count.
    #[arg(long, default_value_t = 1e-3)]
    target: f64,
}

fn methods(list: &str) -> Result<Vec<MethodSel>> {
    list.split(',').map(str::parse).collect()
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_outputs(spec: &SweepSpec, out: &fbl_sweep::SweepOutput) -> Result<()> {
    let path = spec.output.path.as_deref();
    if !out.errors.is_empty() {
        match path {
            Some(p) => emit_error_log(out, File::create(p.with_extension("errors.log"))?)?,
            None => emit_error_log(out, io::stderr().lock())?,
        }
    }
    out.ensure_rows()?;
    match spec.output.format {
        Format::Csv => emit_csv(out, writer(path)?)?,
        Format::Svg => emit_chart(out, spec, writer(path)?)?,
        Format::Both => {
            let p = path.ok_or_else(|| usage("--format both needs --out"))?;
            emit_csv(out, writer(Some(p))?)?;
            emit_chart(out, spec, writer(Some(&p.with_extension("svg")))?)?;
        }
    }
    Ok(())
}

fn apply_output(spec: &mut SweepSpec, flags: &OutputFlags) -> Result<()> {
    if let Some(p) = &flags.out {
        spec.output.path = Some(p.clone());
    }
    if let Some(f) = &flags.format {
        spec.output.format = f.parse()?;
    }
    Ok(())
}

fn apply_mc(spec: &mut SweepSpec, seed: Option<u64>, samples: Option<usize>) {
    if seed.is_some() || samples.is_some() || spec.methods.contains(&MethodSel::Fixed(fbl_core::Method::MonteCarlo)) {
        let mut mc = spec.mc.unwrap_or_default();
        if let Some(s) = seed {
            mc.seed = s;
        }
        if let Some(n) = samples {
            mc.samples = n;
        }
        spec.mc = Some(mc);
    }
}

fn run_and_write(spec: &SweepSpec) -> Result<()> {
    let out = run_sweep(spec)?;
    write_outputs(spec, &out)
}

fn cmd_outage(a: PointArgs) -> Result<()> {
    let scenario: Scenario = a.scenario.parse()?;
    let mut series = Series::new(a.scenario.to_ascii_lowercase(), scenario);
    series.fixed = a.params.scalars()?;
    let mut spec = SweepSpec::new("outage", vec![series]);
    spec.methods = methods(&a.method)?;
    spec.delay = a.delay;
    apply_mc(&mut spec, a.seed, a.samples);
    apply_output(&mut spec, &a.output)?;
    run_and_write(&spec)
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(p) => fbl_sweep::config::load_config(p)?,
        None => SweepSpec::new("sweep", vec![]),
    };
    if let Some(s) = &a.scenario {
        let scenario: Scenario = s.parse()?;
        if spec.series.is_empty() {
            spec.series.push(Series::new(s.to_ascii_lowercase(), scenario));
        } else {
            for series in &mut spec.series {
                series.scenario = scenario;
            }
        }
    }
    if spec.series.is_empty() {
        spec.series.push(Series::new("custom", Scenario::Custom));
    }
    a.params.apply(&mut spec)?;
    if let Some(m) = &a.method {
        spec.methods = methods(m)?;
    }
    spec.delay |= a.delay;
    apply_mc(&mut spec, a.seed, a.samples);
    if let (Some(x), Some(y)) = (&a.chart_x, &a.chart_y) {
        spec.chart = Some(ChartSpec {
            x: x.clone(),
            y: y.split(',').map(str::to_owned).collect(),
            along: None,
            x_log: a.chart_log_x,
            y_log: a.chart_log_y,
            title: spec.name.clone(),
        });
    }
    apply_output(&mut spec, &a.output)?;
    run_and_write(&spec)
}

fn cmd_figure(a: FigureArgs) -> Result<()> {
    let mut spec = figure_preset(&a.id)?;
    a.params.apply(&mut spec)?;
    if let Some(m) = &a.method {
        spec.methods = methods(m)?;
    }
    apply_output(&mut spec, &a.output)?;
    run_and_write(&spec)
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let point = Point::resolve(a.scenario.parse()?, &a.params.scalars()?)?;
    let settings = ValidationSettings {
        samples: a.samples,
        seed: a.seed,
        generate_lambda_scale: a.generate_lambda_scale,
        max_error_bounds: a.max_error_bounds,
        max_delta: a.max_delta,
        ..ValidationSettings::default()
    };
    let report = mc_validate(&point, &settings)?;
    if let Some(p) = &a.dump {
        write_samples(&report.samples, BufWriter::new(File::create(p)?))?;
    }
    print!("{report}");
    if report.pass() {
        Ok(())
    } else {
        Err(SweepError::ValidationFailed)
    }
}

fn cmd_delay(a: DelayArgs) -> Result<()> {
    let mut given = a.params.scalars()?;
    let eps = match a.eps {
        Some(e) => e,
        None => {
            let point = Point::resolve(a.scenario.parse()?, &given)?;
            let p = SinrParams::new(point.alpha, point.lambda, point.d, point.w_p, point.w_s, point.eta)?;
            let c = match point.k {
                Some(k) => CodeParams::from_bits(point.n, k)?,
                None => CodeParams::from_rate(point.n, point.r)?,
            };
            outage(&p, &c, MethodChoice::Auto)?.value
        }
    };
    // the link is not needed past this point; defaults still apply
    given.entry(Param::Lambda).or_insert(0.0);
    let point = Point::resolve(Scenario::Custom, &given)?;
    let cfg = ArqConfig::new(point.m, point.nu, point.symbol_time)?;
    let worst = worst_case_delay(&cfg, point.n);
    let expected = expected_delay(eps, &cfg, point.n)?;
    let mut out = io::stdout().lock();
    writeln!(out, "eps: {eps:.8e}")?;
    writeln!(
        out,
        "attempts: {} feedback: {} symbol_time: {:e}",
        point.m, point.nu, point.symbol_time
    )?;
    writeln!(out, "arq_outage: {:.8e}", arq_outage(eps, point.m)?)?;
    writeln!(
        out,
        "worst_case: channel_uses={} ms={:.8e}",
        worst.channel_uses,
        worst.millis()
    )?;
    writeln!(
        out,
        "expected: channel_uses={:.8e} ms={:.8e} reliability={:.8e}",
        expected.channel_uses,
        expected.millis(),
        expected.reliability.unwrap_or(f64::NAN)
    )?;
    if let Some(ms) = a.budget_ms {
        match max_attempts_within_budget(eps, &cfg, point.n, ms * 1e-3, a.target)? {
            BudgetOutcome::Feasible {
                m,
                meets_target,
                outage,
            } => writeln!(
                out,
                "budget: max_attempts={m} outage={outage:.8e} target={:e} {}",
                a.target,
                if meets_target { "met" } else { "missed" }
            )?,
            BudgetOutcome::Infeasible => writeln!(out, "budget: infeasible")?,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { SweepError::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match cli.command {
        Command::Outage(a) => cmd_outage(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::McValidate(a) => cmd_validate(a),
        Command::Delay(a) => cmd_delay(a),
        Command::Version => {
            println!("fbl {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(SweepError::ValidationFailed) => ExitCode::from(SweepError::EXIT_VALIDATION as u8),
        Err(e) => {
            eprintln!("fbl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
