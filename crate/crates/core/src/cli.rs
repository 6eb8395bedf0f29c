//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 usage error, 2 numerical failure, 3 scan
//! finished with some failed rows.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::geometry::{xi, xi0};
use crate::numerics::Tolerances;
use crate::optics::{BecCloud, ScatterGeometry};
use crate::plot::LineChart;
use crate::pulses::{epsilon_amplitude, perturbative_population, uniform_grid, PulseEnvelope};
use crate::rates::{critical_angle, n_sweep, optimal_waist, theta_scan};
use crate::selfcheck::{run_suite, SUITES};
use crate::table::{format_number, ScanTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bec-collect", version, about = "Fiber collection of Raman photons scattered off a BEC")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Transverse cloud size (k_d units, or metric with --wavelength)
    #[arg(long, global = true, default_value_t = 50.0)]
    pub sigma: f64,
    /// Axial cloud size
    #[arg(long = "sigma-z", global = true, default_value_t = 100.0)]
    pub sigma_z: f64,
    /// Beam waist [default: sqrt(2) * sigma]
    #[arg(long, global = true)]
    pub waist: Option<f64>,
    /// Atom number(s), comma separated
    #[arg(long = "n", global = true, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Angle between drive and fiber axis
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long = "theta-min", global = true, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    /// Upper end of a scan, or of the critical-angle search window
    #[arg(long = "theta-max", global = true, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    /// Number of scan points
    #[arg(long = "theta-steps", global = true, default_value_t = 201)]
    pub theta_steps: usize,
    #[arg(long = "tol-abs", global = true, default_value_t = 1e-12)]
    pub tol_abs: f64,
    #[arg(long = "tol-rel", global = true, default_value_t = 1e-10)]
    pub tol_rel: f64,
    /// Write the result table here
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write an SVG chart next to --out
    #[arg(long, global = true)]
    pub plot: bool,
    /// Angles in and out are in degrees
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Drive wavelength; lengths are then metric in the same unit
    #[arg(long, global = true)]
    pub wavelength: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Side-scattering geometric factor
    Xi,
    /// Forward-scattering geometric factor at --theta
    Xi0,
    /// |xi0(theta)|^2 and xi/N over an angular range
    ScanTheta,
    /// Angle where both channels collect equally, per atom number
    CriticalAngle,
    /// Critical angle as a function of atom number
    SweepN,
    /// Waist maximizing the forward rate
    OptimizeWaist {
        #[arg(long = "w-min")]
        w_min: Option<f64>,
        #[arg(long = "w-max")]
        w_max: Option<f64>,
    },
    /// Readout amplitude for given pulse envelopes
    Epsilon {
        /// Microwave drive: const:A | rect:A:t_on:t_off | gauss:A:t0:width | file:PATH
        #[arg(long)]
        drive: String,
        /// Laser readout, same syntax
        #[arg(long)]
        readout: String,
        #[arg(long = "t-max")]
        t_max: f64,
        /// Number of grid intervals
        #[arg(long, default_value_t = 512)]
        steps: usize,
    },
    /// Run the built-in verification suites
    Selfcheck,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Resolved configuration shared by every subcommand.
struct Context<'a> {
    args: &'a GlobalArgs,
    command: &'static str,
    cloud: BecCloud,
    w0_bar: f64,
    tol: Tolerances,
}

impl<'a> Context<'a> {
    fn new(args: &'a GlobalArgs, command: &'static str) -> CliResult<Self> {
        let scale = match args.wavelength {
            Some(l) if l > 0.0 && l.is_finite() => 2.0 * std::f64::consts::PI / l,
            Some(l) => return usage(format!("--wavelength must be positive, got {l}")),
            None => 1.0,
        };
        for (name, v) in [("--sigma", Some(args.sigma)), ("--sigma-z", Some(args.sigma_z)), ("--waist", args.waist)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return usage(format!("{name} must be positive, got {v}"));
                }
            }
        }
        let cloud = BecCloud::new(args.sigma * scale, args.sigma_z * scale)?;
        let w0_bar = args.waist.map_or(std::f64::consts::SQRT_2 * cloud.sigma_bar(), |w| w * scale);
        let tol = Tolerances::new(args.tol_abs, args.tol_rel, Tolerances::default().max_evaluations)?;
        Ok(Self { args, command, cloud, w0_bar, tol })
    }

    fn angle_in(&self, name: &str, v: f64) -> CliResult<f64> {
        let rad = if self.args.degrees { v.to_radians() } else { v };
        if !(0.0..=std::f64::consts::PI).contains(&rad) {
            return usage(format!("{name} = {v} lies outside [0, pi] (or [0, 180] with --degrees)"));
        }
        Ok(rad)
    }

    fn angle_out(&self, rad: f64) -> f64 {
        if self.args.degrees { rad.to_degrees() } else { rad }
    }

    fn theta(&self) -> CliResult<f64> {
        self.angle_in("--theta", self.args.theta.unwrap_or(0.0))
    }

    fn atoms(&self, default: &[u64]) -> CliResult<Vec<u64>> {
        let n = if self.args.n.is_empty() { default.to_vec() } else { self.args.n.clone() };
        if n.contains(&0) {
            return usage("--n values must be at least 1");
        }
        Ok(n)
    }

    fn single_atom_number(&self, default: u64) -> CliResult<u64> {
        match self.atoms(&[default])?.as_slice() {
            [n] => Ok(*n),
            _ => usage(format!("{} takes a single --n value", self.command)),
        }
    }

    fn geometry(&self, n: u64, theta: f64) -> CliResult<ScatterGeometry> {
        Ok(ScatterGeometry::new(self.cloud, self.w0_bar)?.with_atoms(n)?.with_theta(theta)?)
    }

    fn theta_window(&self) -> CliResult<f64> {
        let hi = self.angle_in("--theta-max", self.args.theta_max.unwrap_or(self.angle_out(0.1)))?;
        if hi <= 0.0 || hi > std::f64::consts::FRAC_PI_2 {
            return usage("critical-angle window --theta-max must lie in (0, pi/2]");
        }
        Ok(hi)
    }

    /// Config echo stored in every output file.
    fn echo(&self, table: &mut ScanTable) {
        let a = self.args;
        table.set_meta("command", self.command);
        table.set_meta("version", env!("CARGO_PKG_VERSION"));
        table.set_meta("sigma_bar", self.cloud.sigma_bar());
        table.set_meta("sigma_z_bar", self.cloud.sigma_z_bar());
        table.set_meta("w0_bar", self.w0_bar);
        table.set_meta("waist_defaulted", a.waist.is_none());
        table.set_meta("tolerances", json!({"abs": self.tol.abs_tol, "rel": self.tol.rel_tol, "max_evaluations": self.tol.max_evaluations}));
        table.set_meta("angle_unit", if a.degrees { "degrees" } else { "radians" });
        if let Some(l) = a.wavelength {
            table.set_meta("wavelength", l);
            table.set_meta("metric_lengths", json!({"sigma": a.sigma, "sigma_z": a.sigma_z, "waist": a.waist}));
        }
    }

    fn emit(&self, mut table: ScanTable, out: &mut dyn Write) -> CliResult<i32> {
        self.echo(&mut table);
        let text = match self.args.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json() + "\n",
        };
        match &self.args.out {
            Some(path) => std::fs::write(path, text)?,
            None if self.args.plot => return usage("--plot needs --out"),
            None => out.write_all(text.as_bytes())?,
        }
        Ok(if table.failed_rows() > 0 { EXIT_PARTIAL } else { EXIT_OK })
    }

    fn write_plot(&self, chart: &LineChart) -> CliResult<Option<PathBuf>> {
        if !self.args.plot {
            return Ok(None);
        }
        let Some(out) = &self.args.out else { return usage("--plot needs --out") };
        let path = out.with_extension("svg");
        std::fs::write(&path, chart.to_svg()?)?;
        Ok(Some(path))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(err, "numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Xi => cmd_xi(&Context::new(g, "xi")?, out),
        Command::Xi0 => cmd_xi0(&Context::new(g, "xi0")?, out),
        Command::ScanTheta => cmd_scan(&Context::new(g, "scan-theta")?, out, err),
        Command::CriticalAngle => cmd_critical(&Context::new(g, "critical-angle")?, out),
        Command::SweepN => cmd_sweep(&Context::new(g, "sweep-n")?, out, err),
        Command::OptimizeWaist { w_min, w_max } => cmd_waist(&Context::new(g, "optimize-waist")?, *w_min, *w_max, out),
        Command::Epsilon { drive, readout, t_max, steps } => {
            cmd_epsilon(&Context::new(g, "epsilon")?, drive, readout, *t_max, *steps, out, err)
        }
        Command::Selfcheck => cmd_selfcheck(out),
    }
}

fn line(out: &mut dyn Write, key: &str, value: f64) -> CliResult<()> {
    writeln!(out, "{key}: {}", format_number(value))?;
    Ok(())
}

fn cmd_xi(ctx: &Context, out: &mut dyn Write) -> CliResult<i32> {
    let n = ctx.single_atom_number(1)?;
    let g = ctx.geometry(n, 0.0)?;
    let r = xi(&g, ctx.tol)?;
    line(out, "xi", r.exact)?;
    line(out, "xi_short_cloud", r.approx)?;
    line(out, "quad_error", r.quad_error)?;
    if ctx.args.out.is_some() {
        let mut t = ScanTable::new(["xi", "xi_short_cloud", "quad_error"]);
        t.push_values(&[r.exact, r.approx, r.quad_error]);
        return ctx.emit(t, out);
    }
    Ok(EXIT_OK)
}

fn cmd_xi0(ctx: &Context, out: &mut dyn Write) -> CliResult<i32> {
    let n = ctx.single_atom_number(1)?;
    let theta = ctx.theta()?;
    let r = xi0(&ctx.geometry(n, theta)?, ctx.tol)?;
    line(out, "theta", ctx.angle_out(theta))?;
    line(out, "xi0_re", r.value.re)?;
    line(out, "xi0_im", r.value.im)?;
    line(out, "xi0_sq", r.magnitude_sq())?;
    if let Some(c) = r.closed_form {
        line(out, "closed_form_re", c.re)?;
        line(out, "closed_form_im", c.im)?;
    }
    if let Some(a) = r.approx_magnitude {
        line(out, "short_cloud_magnitude", a)?;
    }
    line(out, "quad_error", r.quad_error)?;
    if ctx.args.out.is_some() {
        let mut t = ScanTable::new(["theta", "xi0_re", "xi0_im", "xi0_sq", "quad_error"]);
        t.push_values(&[ctx.angle_out(theta), r.value.re, r.value.im, r.magnitude_sq(), r.quad_error]);
        return ctx.emit(t, out);
    }
    Ok(EXIT_OK)
}

fn cmd_scan(ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let n = ctx.single_atom_number(10)?;
    let lo = ctx.angle_in("--theta-min", ctx.args.theta_min.unwrap_or(0.0))?;
    let hi = ctx.angle_in("--theta-max", ctx.args.theta_max.unwrap_or(ctx.angle_out(0.1)))?;
    let steps = ctx.args.theta_steps;
    if steps < 2 || hi <= lo {
        return usage("scan needs --theta-steps >= 2 and --theta-min < --theta-max");
    }
    let thetas: Vec<f64> = (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
    let mut table = theta_scan(&ctx.geometry(n, 0.0)?, &thetas, ctx.tol)?;
    table.set_meta("n_atoms", n);
    table.set_meta("theta_range", json!([ctx.angle_out(lo), ctx.angle_out(hi), steps]));
    if ctx.args.degrees {
        for row in &mut table.rows {
            row.values[0] = row.values[0].map(|t| t.to_degrees());
        }
    }
    let x: Vec<f64> = table.rows.iter().map(|r| r.values[0].unwrap_or(f64::NAN)).collect();
    let y: Vec<f64> = table.rows.iter().map(|r| r.values[1].unwrap_or(f64::NAN)).collect();
    let level = table.rows[0].values[2].unwrap_or(f64::NAN);
    let x_label = if ctx.args.degrees { "theta [deg]" } else { "theta [rad]" };
    let chart = LineChart { title: "forward overlap", x_label, y_label: "|xi0|^2", x: &x, y: &y, reference: Some((level, "xi / N")) };
    let code = ctx.emit(table, out)?;
    if let Some(p) = ctx.write_plot(&chart)? {
        writeln!(err, "plot written to {}", p.display())?;
    }
    Ok(code)
}

fn cmd_critical(ctx: &Context, out: &mut dyn Write) -> CliResult<i32> {
    let window = ctx.theta_window()?;
    let mut table = ScanTable::new(["n", "theta_star"]);
    for n in ctx.atoms(&[10])? {
        let r = critical_angle(&ctx.geometry(n, 0.0)?, window, ctx.tol)?;
        match r.theta_star {
            Some(t) => {
                writeln!(out, "N = {n}: theta* = {}", format_number(ctx.angle_out(t)))?;
                table.push_values(&[n as f64, ctx.angle_out(t)]);
            }
            None => {
                let msg = if r.dominated_everywhere {
                    "isotropic channel dominates at all angles"
                } else {
                    "superradiance dominates the whole window"
                };
                writeln!(out, "N = {n}: no critical angle, {msg}")?;
                table.push(vec![Some(n as f64), None], crate::table::RowStatus::Absent(msg.into()));
            }
        }
    }
    if ctx.args.out.is_some() {
        table.set_meta("theta_max", ctx.angle_out(window));
        return ctx.emit(table, out);
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let window = ctx.theta_window()?;
    let n = ctx.atoms(&[10, 100, 1000, 10_000])?;
    let mut table = n_sweep(&ctx.geometry(1, 0.0)?, &n, window, ctx.tol)?;
    if ctx.args.degrees {
        for row in &mut table.rows {
            row.values[1] = row.values[1].map(|t| t.to_degrees());
        }
    }
    table.set_meta("theta_max", ctx.angle_out(window));
    let x: Vec<f64> = table.rows.iter().map(|r| r.values[0].unwrap_or(f64::NAN).log10()).collect();
    let y: Vec<f64> = table.rows.iter().map(|r| r.values[1].unwrap_or(f64::NAN)).collect();
    let chart = LineChart { title: "critical angle", x_label: "log10 N", y_label: "theta*", x: &x, y: &y, reference: None };
    let code = ctx.emit(table, out)?;
    // a sweep with no crossing at all has nothing to draw
    if y.iter().any(|v| v.is_finite()) {
        if let Some(p) = ctx.write_plot(&chart)? {
            writeln!(err, "plot written to {}", p.display())?;
        }
    }
    Ok(code)
}

fn cmd_waist(ctx: &Context, w_min: Option<f64>, w_max: Option<f64>, out: &mut dyn Write) -> CliResult<i32> {
    let n = ctx.single_atom_number(10)?;
    let theta = ctx.theta()?;
    let scale = ctx.args.wavelength.map_or(1.0, |l| 2.0 * std::f64::consts::PI / l);
    let sigma = ctx.cloud.sigma_bar();
    let lo = w_min.map_or(0.25 * sigma, |w| w * scale);
    let hi = w_max.map_or(8.0 * sigma, |w| w * scale);
    let best = optimal_waist(&ctx.cloud, n, theta, (lo, hi), ctx.tol)?;
    let ratio = best.w0_bar / (std::f64::consts::SQRT_2 * sigma);
    line(out, "w0_bar", best.w0_bar)?;
    line(out, "w0_over_sqrt2_sigma", ratio)?;
    line(out, "forward_prefactor", best.forward_prefactor)?;
    if best.at_boundary {
        writeln!(out, "note: optimum on the search boundary [{}, {}]", format_number(lo), format_number(hi))?;
    }
    if ctx.args.out.is_some() {
        let mut t = ScanTable::new(["w0_bar", "w0_over_sqrt2_sigma", "forward_prefactor"]);
        t.push_values(&[best.w0_bar, ratio, best.forward_prefactor]);
        t.set_meta("waist_range", json!([lo, hi]));
        t.set_meta("at_boundary", best.at_boundary);
        return ctx.emit(t, out);
    }
    Ok(EXIT_OK)
}

fn cmd_epsilon(
    ctx: &Context,
    drive: &str,
    readout: &str,
    t_max: f64,
    steps: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let n = ctx.single_atom_number(1)?;
    let eta = PulseEnvelope::parse_spec(drive)?;
    let omega = PulseEnvelope::parse_spec(readout)?;
    let trace = epsilon_amplitude(&eta, &omega, &uniform_grid(t_max, steps)?)?.with_atoms(n);
    for w in &trace.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let pop = perturbative_population(&trace);
    let mut table = ScanTable::new(["t", "eps_re", "eps_im", "eps_sq"]);
    for ((t, e), p) in trace.times.iter().zip(&trace.epsilon).zip(&pop) {
        table.push_values(&[*t, e.re, e.im, *p]);
    }
    table.set_meta("drive", drive);
    table.set_meta("readout", readout);
    table.set_meta("n_atoms", n);
    table.set_meta("warnings", &trace.warnings);
    let x = trace.times.clone();
    let chart = LineChart { title: "readout population", x_label: "t", y_label: "|eps|^2", x: &x, y: &pop, reference: None };
    let code = ctx.emit(table, out)?;
    if let Some(p) = ctx.write_plot(&chart)? {
        writeln!(err, "plot written to {}", p.display())?;
    }
    Ok(code)
}

fn cmd_selfcheck(out: &mut dyn Write) -> CliResult<i32> {
    let mut failed = 0;
    for suite in SUITES {
        let outcome = run_suite(suite);
        if !outcome.passed {
            failed += 1;
        }
        writeln!(out, "{outcome}")?;
        out.flush()?;
    }
    writeln!(out, "{} of {} suites passed", SUITES.len() - failed, SUITES.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}

/// Convenience for tests and embedding: runs and captures both streams.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

