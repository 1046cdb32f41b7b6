//! Command-line front end for `qcap-core`.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O or unreadable input, 4 numerical
//! non-convergence, 5 validation failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcap_core::capacity::{integrate_capacity, mf_closed_form, CapacityEstimate, CapacityReport, Method};
use qcap_core::chain::{efficiency_spectrum, spectrum_csv};
use qcap_core::designs::{
    butterworth_elements, maximally_flat_params, uniform_params, verify_butterworth_correspondence,
};
use qcap_core::optimize::{
    family_sweep, grid_search, grid_search_0stage, grid_search_1stage, parse_fixed, sweep_csv,
    symmetric_resonant_search, Axis, Family, Objective, SearchSpace,
};
use qcap_core::validation::{run_validation, ValidationOptions};
use qcap_core::{Bound, DegradableForm, Protocol, QuadratureConfig, TransducerParams};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] qcap_core::Error),
    #[error("validation failed: {0} check(s) did not pass")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qcap_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
            CliError::Core(E::NonConvergence(_) | E::Conditioning(_) | E::InternalConsistency(_)) => 4,
            CliError::Core(_) => 2,
            CliError::ValidationFailed(_) => 5,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Quantum capacities of multi-stage bosonic transducers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the parameters of a maximally flat or uniform design as JSON.
    Design(DesignArgs),
    /// Sample the conversion efficiency of a parameter file as CSV.
    Spectrum(SpectrumArgs),
    /// Integrate a continuous-time capacity for a parameter file.
    Capacity(CapacityArgs),
    /// Evaluate a closed-form capacity of the maximally flat design.
    ClosedForm(ClosedFormArgs),
    /// Capacities of a design family over a range of stage counts, as CSV.
    Sweep(SweepArgs),
    /// Exhaustive grid search over transducer parameters.
    Optimize(OptimizeArgs),
    /// Element values of the normalized Butterworth ladder.
    Butterworth(ButterworthArgs),
    /// Run the built-in cross-checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DesignKind {
    Mf,
    Uniform,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(value_enum)]
    pub kind: DesignKind,
    #[arg(long)]
    pub stages: usize,
    #[arg(long, default_value_t = 1.0)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega_c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Half-width of the window around omega_c, in units of the chain's mean rate.
    #[arg(long, default_value_t = 5.0)]
    pub span: f64,
    #[arg(long, allow_negative_numbers = true, requires = "omega_max")]
    pub omega_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "omega_min")]
    pub omega_max: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProtocolArg {
    OneWay,
    TwoWay,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::OneWay => Protocol::OneWay,
            ProtocolArg::TwoWay => Protocol::TwoWay,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Pure,
    ThermalLower,
    ThermalUpper,
}

impl From<BoundArg> for Bound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Pure => Bound::Pure,
            BoundArg::ThermalLower => Bound::ThermalLower,
            BoundArg::ThermalUpper => Bound::ThermalUpper,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DegradableArg {
    /// h-terms outside the logarithm
    Outside,
    /// h-terms inside the logarithm
    Inside,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value = "one-way")]
    pub protocol: ProtocolArg,
    #[arg(long, value_enum, default_value = "pure")]
    pub bound: BoundArg,
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Physical g_max in Hz; capacities are then reported in qubits per second
    /// (value multiplied by g_max) instead of units of g_max.
    #[arg(long)]
    pub gmax: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Truncation half-width for unbounded integrands, in mean rates.
    #[arg(long, default_value_t = 50.0)]
    pub window: f64,
    #[arg(long, default_value_t = 4000)]
    pub max_intervals: usize,
    #[arg(long, value_enum, default_value = "outside")]
    pub degradable_form: DegradableArg,
}

impl QuadratureArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            window_halfwidth_bandwidths: self.window,
            singularity_split: true,
            max_intervals: self.max_intervals,
            degradable_form: match self.degradable_form {
                DegradableArg::Outside => DegradableForm::EntropyOutsideLog,
                DegradableArg::Inside => DegradableForm::EntropyInsideLog,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    #[arg(long)]
    pub stages: usize,
    #[command(flatten)]
    pub channel: ChannelArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Mf,
    Uniform,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Q1,
    Q2,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub stages: usize,
    #[arg(long, value_enum, default_value = "q2")]
    pub objective: ObjectiveArg,
    /// `name:min:max:points`; repeatable.
    #[arg(long = "axis", allow_hyphen_values = true)]
    pub axes: Vec<String>,
    /// `name=value`; repeatable.
    #[arg(long = "fix", allow_hyphen_values = true)]
    pub fixed: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub refine: usize,
    /// Mirror couplings (`g_j = g_{N+2-j}`) and search `kappa`, `g1..`.
    #[arg(long)]
    pub symmetric: bool,
    /// Per-point relative tolerance during the sweep.
    #[arg(long, default_value_t = 1e-5)]
    pub sweep_rel_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every grid sample as CSV.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ButterworthArgs {
    /// Ladder order; defaults to `stages + 2`.
    #[arg(long, conflicts_with = "stages")]
    pub order: Option<usize>,
    #[arg(long)]
    pub stages: Option<usize>,
    /// Emit the MF-transducer correspondence report instead of the netlist.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub stages_max: u64,
    /// Scale the external rates of every MF design (negative control).
    #[arg(long, default_value_t = 1.0)]
    pub kappa_scale: f64,
    /// Skip the optimizer recovery checks.
    #[arg(long)]
    pub no_search: bool,
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_params(path: &Path) -> Result<TransducerParams> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let params: TransducerParams = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    params.validate()?;
    Ok(params)
}

fn check_gmax(gmax: Option<f64>) -> Result<()> {
    match gmax {
        Some(g) if !(g > 0.0 && g.is_finite()) => Err(CliError::Usage(format!("--gmax must be positive, got {g}"))),
        _ => Ok(()),
    }
}

fn report_json(estimate: CapacityEstimate, channel: &ChannelArgs) -> String {
    let mut report = CapacityReport::new(estimate, channel.protocol.into(), channel.bound.into(), channel.nbar);
    if let Some(g) = channel.gmax {
        report.value *= g;
        report.abs_error *= g;
    }
    let mut value = serde_json::to_value(report).expect("serializable");
    if let Some(g) = channel.gmax {
        value["units"] = "qubits/s".into();
        value["gmax_hz"] = g.into();
    }
    to_json(&value)
}

/// Runs one parsed command, writing primary output to `stdout` unless a file is named.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Design(a) => {
            let params = match a.kind {
                DesignKind::Mf => maximally_flat_params(a.stages, a.g_max, a.omega_c)?.params,
                DesignKind::Uniform => uniform_params(a.stages, a.g_max, a.omega_c)?,
            };
            write_output(a.out.as_deref(), &to_json(&params), stdout)
        }
        Command::Spectrum(a) => {
            let params = read_params(&a.params)?;
            let (lo, hi) = match (a.omega_min, a.omega_max) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => {
                    let half = a.span * params.mean_rate();
                    (params.omega_c - half, params.omega_c + half)
                }
            };
            let samples = efficiency_spectrum(&params, lo, hi, a.points)?;
            write_output(a.out.as_deref(), &spectrum_csv(&samples), stdout)
        }
        Command::Capacity(a) => {
            check_gmax(a.channel.gmax)?;
            let params = read_params(&a.params)?;
            let est = integrate_capacity(
                &params,
                a.channel.protocol.into(),
                a.channel.bound.into(),
                a.channel.nbar,
                &a.quadrature.config(),
            )?;
            write_output(None, &report_json(est, &a.channel), stdout)
        }
        Command::ClosedForm(a) => {
            check_gmax(a.channel.gmax)?;
            let value = mf_closed_form(a.stages, a.channel.protocol.into(), a.channel.bound.into(), a.channel.nbar)
                .ok_or_else(|| {
                CliError::Usage(format!("no closed form for {:?} {:?}", a.channel.protocol, a.channel.bound))
            })??;
            let est = CapacityEstimate { value, abs_error: 0.0, method: Method::ClosedForm };
            write_output(None, &report_json(est, &a.channel), stdout)
        }
        Command::Sweep(a) => {
            check_gmax(a.channel.gmax)?;
            let family = match a.family {
                FamilyArg::Mf => Family::Mf,
                FamilyArg::Uniform => Family::Uniform,
            };
            let mut rows = family_sweep(
                family,
                a.n_min,
                a.n_max,
                a.channel.protocol.into(),
                a.channel.bound.into(),
                a.channel.nbar,
                &a.quadrature.config(),
            )?;
            if let Some(g) = a.channel.gmax {
                for r in &mut rows {
                    r.value *= g;
                    r.abs_error *= g;
                    r.closed_form = r.closed_form.map(|c| c * g);
                }
            }
            write_output(a.out.as_deref(), &sweep_csv(&rows), stdout)
        }
        Command::Optimize(a) => run_optimize(a, stdout),
        Command::Butterworth(a) => {
            let text = if a.verify {
                let n = match (a.stages, a.order) {
                    (Some(n), _) => n,
                    (None, Some(m)) if m >= 2 => m - 2,
                    _ => return Err(CliError::Usage("--verify needs --stages or --order >= 2".into())),
                };
                to_json(&verify_butterworth_correspondence(n)?)
            } else {
                let order = match (a.order, a.stages) {
                    (Some(m), _) => m,
                    (None, Some(n)) => n + 2,
                    (None, None) => return Err(CliError::Usage("give --order or --stages".into())),
                };
                to_json(&butterworth_elements(order)?.to_json_value())
            };
            write_output(a.out.as_deref(), &text, stdout)
        }
        Command::Validate(a) => {
            let opts = ValidationOptions {
                max_stages: a.stages_max as usize,
                kappa_scale: a.kappa_scale,
                search: !a.no_search,
            };
            let report = run_validation(&opts)?;
            write_output(None, &to_json(&report), stdout)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::ValidationFailed(report.summary.failed))
            }
        }
    }
}

fn default_space(n_stages: usize) -> Option<SearchSpace> {
    match n_stages {
        0 => Some(SearchSpace::new(vec![
            Axis::new("kappa_a", 0.5, 4.0, 21),
            Axis::new("kappa_b", 0.5, 4.0, 21),
            Axis::new("delta", -2.0, 2.0, 21),
        ])),
        1 => Some(SearchSpace::new(vec![
            Axis::new("kappa_a", 1.0, 5.0, 21),
            Axis::new("kappa_b", 1.0, 5.0, 21),
            Axis::new("g_b", 0.2, 1.0, 21),
        ])),
        _ => None,
    }
}

fn run_optimize(a: OptimizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let usage = |e: qcap_core::Error| CliError::Usage(e.to_string());
    let mut space = if a.axes.is_empty() {
        default_space(a.stages)
            .ok_or_else(|| CliError::Usage(format!("no default search space for N = {}; pass --axis", a.stages)))?
    } else {
        let axes = a.axes.iter().map(|s| s.parse::<Axis>()).collect::<qcap_core::Result<Vec<_>>>().map_err(usage)?;
        SearchSpace::new(axes)
    };
    for f in &a.fixed {
        let (name, value) = parse_fixed(f).map_err(usage)?;
        space.fixed.insert(name, value);
    }
    space.validate().map_err(usage)?;
    let objective = match a.objective {
        ObjectiveArg::Q1 => Objective::Q1,
        ObjectiveArg::Q2 => Objective::Q2,
    };
    let cfg = QuadratureConfig { rel_tol: a.sweep_rel_tol, ..QuadratureConfig::sweep() };
    let result = if a.symmetric {
        symmetric_resonant_search(a.stages, objective, &space, a.refine, &cfg)
    } else {
        match a.stages {
            0 => grid_search_0stage(objective, &space, a.refine, &cfg),
            1 => grid_search_1stage(objective, &space, a.refine, &cfg),
            n => grid_search(n, objective, &space, a.refine, &cfg),
        }
    }
    .map_err(|e| match e {
        qcap_core::Error::InvalidSearch(_) => usage(e),
        other => CliError::Core(other),
    })?;
    if let Some(path) = &a.samples_csv {
        fs::write(path, result.samples_csv()).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    write_output(a.out.as_deref(), &to_json(&result), stdout)
}

/// Applies `QCAP_THREADS`, if set, to the global thread pool.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("QCAP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QCAP_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<()>, String) {
        let cli = Cli::try_parse_from(std::iter::once("qcap").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn design_json() {
        let (r, out) = run_args(&["design", "mf", "--stages", "0"]);
        r.unwrap();
        let p: TransducerParams = serde_json::from_str(&out).unwrap();
        assert_eq!(p.kappa_a, 2.0);
    }

    #[test]
    fn negative_stage_count_is_usage_error() {
        let e = Cli::try_parse_from(["qcap", "design", "mf", "--stages", "-1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn closed_form_missing_is_usage() {
        let (r, _) = run_args(&[
            "closed-form",
            "--stages",
            "0",
            "--protocol",
            "one-way",
            "--bound",
            "thermal-upper",
            "--nbar",
            "1",
        ]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn closed_form_with_gmax() {
        let (r, out) = run_args(&["closed-form", "--stages", "0", "--protocol", "two-way", "--gmax", "2"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let expected = 2.0 * 4.0 * std::f64::consts::PI / std::f64::consts::LN_2;
        assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
        assert_eq!(v["units"], "qubits/s");
        assert_eq!(v["method"], "closed-form");
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Core(qcap_core::Error::NonConvergence("x".into())).exit_code(), 4);
        assert_eq!(CliError::Core(qcap_core::Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::ValidationFailed(1).exit_code(), 5);
    }
}
