//! Batch front end. Each subcommand reads one JSON config and writes
//! `polynomial.json`, `report.json` and, with `--csv`, `errors.csv`.
//!
//! Exit codes: 0 ok, 1 config error, 2 tolerance unachievable, 3 post-hoc or
//! verification failure, 4 SOS identity failure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bernstein::{ApproxOptions, BernsteinScheme};
use crate::error::Error;
use crate::field::{Differentiable, Field};
use crate::grid::{norm_sq, Grid};
use crate::lyapunov::{
    check_sos_certificate, transfer_certificate, LyapunovHypotheses, SosCertificateDocument,
    Targets, TransferOptions, VectorField,
};
use crate::polynomial::MultiIndex;
use crate::region::BoxRegion;
use crate::scalar::{format_rational, parse_rational};
use crate::sobolev::{approximate_sobolev, SobolevOptions};
use crate::weighted::{approximate_weighted_sobolev, WeightedOptions};
use crate::{ExactPolynomial, Expression};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
/// Overrides every degree cap when set.
pub const DEGREE_CAP_ENV: &str = "POLYCERT_DEGREE_CAP";

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_UNACHIEVABLE: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;
pub const EXIT_SOS: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "polycert",
    version,
    about = "Polynomial approximation and Lyapunov certificate tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sobolev-norm approximation of a smooth field.
    Approx(RunArgs),
    /// Weighted Sobolev approximation (error vanishing quadratically at 0).
    Weighted(RunArgs),
    /// Replace a smooth Lyapunov function by a polynomial one.
    Lyapunov(RunArgs),
    /// Check an SOS certificate file exactly.
    CheckSos(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Points per axis of the verification grid.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Also write errors.csv.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Library(Error),
    Rejected(String, u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Rejected(_, code) => *code,
            Failure::Library(e) => match e {
                Error::ToleranceUnachievable { .. } => EXIT_UNACHIEVABLE,
                Error::VerificationFailed { .. } | Error::HypothesisFailed(_) => EXIT_VERIFICATION,
                _ => EXIT_CONFIG,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) | Failure::Rejected(m, _) => f.write_str(m),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    ExitCode::from(run(&cli))
}

/// Runs one command and returns its exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Approx(a) => cmd_approx(a),
        Command::Weighted(a) => cmd_weighted(a),
        Command::Lyapunov(a) => cmd_lyapunov(a),
        Command::CheckSos(a) => cmd_check_sos(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("polycert: {e}");
            e.code()
        }
    }
}

#[derive(Debug, Deserialize)]
struct ApproxConfig {
    expression: String,
    dimension: usize,
    epsilon: f64,
    #[serde(default = "unit_radius")]
    radius: Value,
    #[serde(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Default, Deserialize)]
struct Tuning {
    /// Points per axis of the verification grid.
    grid: Option<usize>,
    /// `"plain"` or `"extrapolated"`.
    scheme: Option<String>,
    extrapolation_order: Option<u32>,
    lipschitz: Option<f64>,
    degree_cap: Option<u32>,
    taylor_order: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct LyapunovConfig {
    v: String,
    vector_field: Vec<String>,
    #[serde(default = "unit_radius")]
    radius: Value,
    hypotheses: HypothesesConfig,
    targets: Targets,
    sup_bound: Option<f64>,
    #[serde(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesesConfig {
    beta0: f64,
    gamma0: f64,
    delta0: f64,
}

fn unit_radius() -> Value {
    json!(1)
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    match value.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == u64::from(CONFIG_SCHEMA_VERSION) => {}
        Some(v) => return Err(Failure::Config(format!("unsupported schema_version {v}"))),
        None => return Err(Failure::Config("missing schema_version".into())),
    }
    serde_json::from_value(value).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Radius given as a JSON number or as a string such as `"1/2"`.
fn parse_radius(value: &Value) -> std::result::Result<BigRational, Failure> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => {
            return Err(Failure::Config(
                "radius must be a number or a rational string".into(),
            ))
        }
    };
    parse_rational(&text).ok_or_else(|| Failure::Config(format!("bad radius {text:?}")))
}

fn degree_cap(config: Option<u32>) -> std::result::Result<Option<u32>, Failure> {
    match std::env::var(DEGREE_CAP_ENV) {
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(d) if d >= 1 => Ok(Some(d)),
            _ => Err(Failure::Config(format!(
                "{DEGREE_CAP_ENV}={s:?} is not a positive integer"
            ))),
        },
        Err(_) => Ok(config),
    }
}

impl Tuning {
    fn approx_options(&self) -> std::result::Result<ApproxOptions, Failure> {
        let scheme = match (self.scheme.as_deref(), self.extrapolation_order) {
            (None | Some("extrapolated"), None) => BernsteinScheme::default(),
            (None | Some("extrapolated"), Some(order)) => BernsteinScheme::Extrapolated { order },
            (Some("plain"), None) => BernsteinScheme::Plain,
            (Some(s), _) => return Err(Failure::Config(format!("bad scheme {s:?}"))),
        };
        Ok(ApproxOptions {
            scheme,
            lipschitz: self.lipschitz,
            degree_cap: degree_cap(self.degree_cap)?,
            ..ApproxOptions::default()
        })
    }

    fn verify_density(&self, args: &RunArgs) -> std::result::Result<usize, Failure> {
        match args.grid.or(self.grid) {
            Some(n) if n < 2 => Err(Failure::Config(
                "grid needs at least 2 points per axis".into(),
            )),
            Some(n) => Ok(n),
            None => Ok(64),
        }
    }

    fn weighted_options(&self, args: &RunArgs) -> std::result::Result<WeightedOptions, Failure> {
        let defaults = WeightedOptions::default();
        Ok(WeightedOptions {
            approx: self.approx_options()?,
            taylor_order: self.taylor_order.unwrap_or(defaults.taylor_order),
            verify_density: self.verify_density(args)?,
            ..defaults
        })
    }
}

fn parse_field(config: &ApproxConfig) -> std::result::Result<(Expression, BoxRegion), Failure> {
    let v = Expression::parse(&config.expression, config.dimension).map_err(Error::from)?;
    let region = BoxRegion::centered(config.dimension, parse_radius(&config.radius)?)?;
    Ok((v, region))
}

struct Output<'a> {
    dir: &'a Path,
}

impl Output<'_> {
    fn write(&self, name: &str, contents: &str) -> Outcome {
        fs::create_dir_all(self.dir)
            .and_then(|_| fs::write(self.dir.join(name), contents))
            .map_err(|e| {
                Failure::Config(format!(
                    "cannot write {}: {e}",
                    self.dir.join(name).display()
                ))
            })
    }

    fn polynomial(&self, p: &ExactPolynomial) -> Outcome {
        self.write("polynomial.json", &(p.to_json() + "\n"))
    }

    fn report(&self, report: &Value) -> Outcome {
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        self.write("report.json", &(text + "\n"))
    }
}

/// Signed errors `D^α p − D^α v` (divided by `xᵀx` when `weighted`) on `grid`,
/// one row per point; weighted dumps skip the ball `‖x‖ < eta`.
fn error_csv(
    p: &ExactPolynomial,
    v: &Expression,
    grid: &Grid,
    weighted: Option<f64>,
) -> std::result::Result<String, Failure> {
    let n = p.dimension();
    let u = Field::Polynomial(p.clone());
    let w = Field::Expression(v.clone());
    let alphas = MultiIndex::binary(n);
    let columns = alphas
        .iter()
        .map(|a| Ok((u.partial(a)?.sample(grid)?, w.partial(a)?.sample(grid)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    header.push("value_error".into());
    header.extend(alphas.iter().skip(1).map(|a| format!("d{a}_error")));
    writeln!(out, "{}", header.join(",")).expect("in-memory write");
    for k in 0..grid.len() {
        let x = grid.point(k);
        let s = norm_sq(&x);
        let scale = match weighted {
            Some(eta) if s.sqrt() < eta => continue,
            Some(_) => 1.0 / s,
            None => 1.0,
        };
        let row: Vec<String> = x
            .iter()
            .map(f64::to_string)
            .chain(
                columns
                    .iter()
                    .map(|(a, b)| ((a[k] - b[k]) * scale).to_string()),
            )
            .collect();
        writeln!(out, "{}", row.join(",")).expect("in-memory write");
    }
    Ok(String::from_utf8(out).expect("ascii"))
}

fn cmd_approx(args: &RunArgs) -> Outcome {
    let config: ApproxConfig = read_config(&args.config)?;
    let (v, region) = parse_field(&config)?;
    let options = SobolevOptions {
        approx: config.tuning.approx_options()?,
        verify_density: config.tuning.verify_density(args)?,
    };
    let result = approximate_sobolev(&v, config.epsilon, &region, &options)?;
    let out = Output { dir: &args.out };
    if args.csv {
        let grid = Grid::offset(&region, options.verify_density)?;
        out.write(
            "errors.csv",
            &error_csv(&result.polynomial, &v, &grid, None)?,
        )?;
    }
    out.polynomial(&result.polynomial)?;
    out.report(&json!({
        "command": "approx",
        "expression": v.to_string(),
        "dimension": config.dimension,
        "radius": format_rational(region.radius().expect("centred")),
        "epsilon": config.epsilon,
        "component_tolerance": result.component_tolerance,
        "components": result.components.iter().map(|c| json!({
            "alpha": c.alpha, "degree": c.degree, "sampled_error": c.sampled_error,
        })).collect::<Vec<_>>(),
        "verify_density": options.verify_density,
        "verification": result.verification,
        "sampled_error": result.sampled_error(),
        "passed": true,
    }))
}

fn cmd_weighted(args: &RunArgs) -> Outcome {
    let config: ApproxConfig = read_config(&args.config)?;
    let (v, region) = parse_field(&config)?;
    let options = config.tuning.weighted_options(args)?;
    let result = approximate_weighted_sobolev(&v, config.epsilon, &region, &options)?;
    let out = Output { dir: &args.out };
    if args.csv {
        let grid = Grid::offset(&region, options.verify_density)?;
        out.write(
            "errors.csv",
            &error_csv(&result.polynomial, &v, &grid, Some(options.eta))?,
        )?;
    }
    out.polynomial(&result.polynomial)?;
    out.report(&json!({
        "command": "weighted",
        "expression": v.to_string(),
        "dimension": config.dimension,
        "radius": format_rational(region.radius().expect("centred")),
        "epsilon": config.epsilon,
        "taylor_order": options.taylor_order,
        "eta": options.eta,
        "component_tolerance": result.component_tolerance,
        "components": result.components.iter().map(|(alpha, c)| json!({
            "alpha": alpha,
            "degree": c.residual.degree,
            "residual_error": c.residual.sampled_error,
            "weighted_error": c.verification.error.value,
        })).collect::<Vec<_>>(),
        "verify_density": options.verify_density,
        "verification": result.verification,
        "sampled_error": result.sampled_error(),
        "passed": true,
    }))
}

fn cmd_lyapunov(args: &RunArgs) -> Outcome {
    let config: LyapunovConfig = read_config(&args.config)?;
    let f = VectorField::parse(&config.vector_field)?;
    let n = f.dimension();
    let v = Expression::parse(&config.v, n).map_err(Error::from)?;
    let region = BoxRegion::centered(n, parse_radius(&config.radius)?)?;
    let h = &config.hypotheses;
    let hyp = LyapunovHypotheses::new(h.beta0, h.gamma0, h.delta0, region.clone())?;
    let grid_density = config.tuning.verify_density(args)?;
    let options = TransferOptions {
        weighted: config.tuning.weighted_options(args)?,
        grid_density,
        sup_bound: config.sup_bound,
        ..TransferOptions::default()
    };
    let t = transfer_certificate(&v, &f, &hyp, &config.targets, &options)?;
    let out = Output { dir: &args.out };
    if args.csv {
        let grid = Grid::endpoint(&region, grid_density)?;
        out.write(
            "errors.csv",
            &error_csv(&t.polynomial, &v, &grid, Some(options.weighted.eta))?,
        )?;
    }
    out.polynomial(&t.polynomial)?;
    out.report(&json!({
        "command": "lyapunov",
        "v": v.to_string(),
        "vector_field": f.components().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "radius": format_rational(hyp.radius()),
        "targets": config.targets,
        "sup_norm": t.sup_norm,
        "budget_limit": t.budget_limit,
        "budget": t.budget,
        "weighted_tolerance": t.weighted_tolerance,
        "hypotheses": t.hypotheses,
        "certificate": t.report,
        "passed": t.report.passed,
    }))?;
    if t.report.passed {
        Ok(())
    } else {
        Err(Failure::Rejected(
            "polynomial certificate fails the sampled target inequalities".into(),
            EXIT_VERIFICATION,
        ))
    }
}

#[derive(Serialize)]
struct SosReport<'a> {
    command: &'static str,
    holds: bool,
    value_residual: &'a ExactPolynomial,
    decay_residual: &'a ExactPolynomial,
}

fn cmd_check_sos(args: &RunArgs) -> Outcome {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let (certificate, f) = SosCertificateDocument::from_json(&text)?.into_parts()?;
    let verdict = check_sos_certificate(&certificate, &f)?;
    let report = SosReport {
        command: "check-sos",
        holds: verdict.holds,
        value_residual: &verdict.value_residual,
        decay_residual: &verdict.decay_residual,
    };
    Output { dir: &args.out }.report(&serde_json::to_value(report).expect("reports serialize"))?;
    if verdict.holds {
        Ok(())
    } else {
        Err(Failure::Rejected(
            "certificate identities do not hold exactly".into(),
            EXIT_SOS,
        ))
    }
}
