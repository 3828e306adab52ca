//! Command-line front end.
//!
//! Every subcommand takes either inline flags or `--file` with a JSON problem
//! (or a JSON array of problems, solved in parallel). Reports are JSON on
//! standard output; exit codes are 0 for an answer (including "not
//! admissible"), 1 for invalid input and 2 when the solver fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::applications::{extremal_distribution, intermediate_moment_bound, smoothest_interpolant};
use crate::cone::{self, SolverConfig};
use crate::error::Error;
use crate::kolmogorov::{check_admissible, check_recursive, extremal_family_sample, witness_spline};
use crate::splines::{class_transfer, norms, TransferDirection};
use crate::types::{ExponentVector, MomentVector, PerfectSpline, SplineClass};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Witness,
    Represent,
    Canonical,
    Interpolate,
    MomentBound,
    ExtremalDist,
    FamilySample,
    Norms,
}

/// One problem, as read from a problem file or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<SplineClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default)]
    pub orders: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, rename = "A", alias = "a", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub recursive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spline: Option<PerfectSpline>,
    /// Solver overrides for this problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
}

#[derive(Parser, Debug)]
#[command(name = "kolmo", version, about = "Kolmogorov's problem for CM and MM functions via power moments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Classify a norm vector as interior, boundary or not admissible.
    Check(Flags),
    /// Witness perfect spline of an admissible norm vector.
    Witness(Flags),
    /// Principal atomic representation of an interior moment vector.
    Represent(Flags),
    /// Canonical representation with a prescribed root `--t-star`.
    Canonical(Flags),
    /// Smoothest interpolant and its minimal r-th derivative norm.
    Interpolate(Flags),
    /// Sharp bound on the norm of derivative `--p`.
    MomentBound(Flags),
    /// Extremal distribution function and max P(xi > A).
    ExtremalDist(Flags),
    /// Random members of the extremal spline family.
    FamilySample(Flags),
    /// Derivative norms of a spline (`--spline`) at `--orders`.
    Norms(Flags),
    /// Run the problems of a file, each with its own `command`.
    Run(Flags),
}

impl Sub {
    fn split(self) -> (Option<Command>, Flags) {
        match self {
            Sub::Check(f) => (Some(Command::Check), f),
            Sub::Witness(f) => (Some(Command::Witness), f),
            Sub::Represent(f) => (Some(Command::Represent), f),
            Sub::Canonical(f) => (Some(Command::Canonical), f),
            Sub::Interpolate(f) => (Some(Command::Interpolate), f),
            Sub::MomentBound(f) => (Some(Command::MomentBound), f),
            Sub::ExtremalDist(f) => (Some(Command::ExtremalDist), f),
            Sub::FamilySample(f) => (Some(Command::FamilySample), f),
            Sub::Norms(f) => (Some(Command::Norms), f),
            Sub::Run(f) => (None, f),
        }
    }
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Problem file (one JSON problem or an array of problems).
    #[arg(long)]
    file: Option<PathBuf>,
    /// JSON solver configuration overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    class: Option<SplineClass>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    orders: Vec<u32>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
    #[arg(long)]
    t_star: Option<f64>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long = "A", alias = "a", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-check through the recursive characterization (needs k_d = r).
    #[arg(long)]
    recursive: bool,
    /// Spline record or witness report (JSON) for `norms`.
    #[arg(long)]
    spline: Option<PathBuf>,
    /// Indent the JSON report.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    error: Value,
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, error: json!({"kind": "InvalidInput", "message": msg.into()}) }
}

fn error_kind(e: &Error) -> String {
    format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NewtonDiverged(_) | Error::ReductionFailed(_) | Error::NonUniqueWithinTolerance => EXIT_SOLVER,
            _ => EXIT_INPUT,
        };
        Failure { code, error: json!({"kind": error_kind(&e), "message": e.to_string()}) }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| input_error(format!("{what}: {e}")))
}

fn load_spline(path: &Path) -> Result<PerfectSpline, Failure> {
    let v = read_json(path)?;
    // accept a bare record or any report carrying one under result.spline / result.witness
    let candidate = ["/result/spline", "/result/witness", ""]
        .iter()
        .find_map(|p| v.pointer(p).filter(|x| x.is_object()).cloned())
        .unwrap_or(v);
    parse(candidate, "spline")
}

fn problems_from(command: Option<Command>, flags: &Flags) -> Result<Vec<Problem>, Failure> {
    let mut problems = match &flags.file {
        Some(path) => match read_json(path)? {
            Value::Array(items) => {
                items.into_iter().map(|v| parse(v, "problem")).collect::<Result<Vec<Problem>, _>>()?
            }
            v => vec![parse(v, "problem")?],
        },
        None => {
            let spline = flags.spline.as_deref().map(load_spline).transpose()?;
            vec![Problem {
                command,
                class: flags.class,
                r: flags.r,
                orders: flags.orders.clone(),
                values: flags.values.clone(),
                t_star: flags.t_star,
                p: flags.p,
                a: flags.a,
                count: flags.count,
                seed: flags.seed,
                recursive: flags.recursive,
                spline,
                solver: None,
            }]
        }
    };
    for p in &mut problems {
        match (command, p.command) {
            (Some(c), None) => p.command = Some(c),
            (Some(c), Some(f)) if c != f => {
                return Err(input_error(format!("problem command {f:?} does not match subcommand {c:?}")))
            }
            (None, None) => return Err(input_error("problem without a command")),
            _ => {}
        }
    }
    Ok(problems)
}

fn exponents(p: &Problem) -> Result<ExponentVector, Failure> {
    let r = p.r.or_else(|| p.spline.as_ref().map(PerfectSpline::r)).or_else(|| p.orders.last().copied());
    Ok(ExponentVector::new(&p.orders, r.unwrap_or(0))?)
}

fn moments(p: &Problem) -> Result<MomentVector, Failure> {
    let values = p.values.clone().ok_or_else(|| input_error("missing values"))?;
    Ok(MomentVector::new(values, exponents(p)?)?)
}

fn class(p: &Problem) -> SplineClass {
    p.class.unwrap_or(SplineClass::Cm)
}

fn required<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| input_error(format!("missing {name}")))
}

fn norm_residual(spline: &PerfectSpline, m: &MomentVector) -> Result<f64, Failure> {
    let got = norms(spline, m.exponents())?;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    Ok(got
        .values()
        .iter()
        .zip(m.values())
        .map(|(g, v)| (g - v).abs() / if *v > 0.0 { *v } else { scale })
        .fold(0.0, f64::max))
}

/// Result, residual and diagnostics of one problem.
fn solve(p: &Problem, config: &SolverConfig) -> Result<(Value, Option<f64>, Option<Value>), Failure> {
    let command = p.command.expect("command resolved");
    for (name, v) in [("t_star", p.t_star), ("A", p.a)] {
        if v.is_some_and(|x| !x.is_finite()) {
            return Err(input_error(format!("{name} must be finite")));
        }
    }
    if command == Command::FamilySample {
        let k = exponents(p)?;
        let splines = extremal_family_sample(class(p), &k, required(p.count, "count")?, p.seed.unwrap_or(0))?;
        return Ok((json!({ "splines": splines }), None, None));
    }
    if command == Command::Norms {
        let spline = p.spline.clone().ok_or_else(|| input_error("missing spline"))?;
        let m = norms(&spline, &exponents(p)?)?;
        let residual = p.values.as_ref().map(|v| MomentVector::new(v.clone(), m.exponents().clone())).transpose()?;
        let residual = residual.map(|target| norm_residual(&spline, &target)).transpose()?;
        return Ok((json!({ "values": m.values() }), residual, None));
    }

    let m = moments(p)?;
    let cm = match class(p) {
        SplineClass::Cm => m.clone(),
        SplineClass::Mm => class_transfer(&m, TransferDirection::MmToCm)?,
    };
    let (_, diag) = cone::classify_with_diagnostics(&cm, config)?;
    let diagnostics = Some(serde_json::to_value(diag).expect("serializable"));
    let not_admissible = |e: &Error| matches!(e, Error::NotAdmissible);

    let (result, residual) = match command {
        Command::Check => {
            let report = if p.recursive {
                check_recursive(class(p), &m, config)?
            } else {
                check_admissible(class(p), &m, config)?
            };
            let residual = report.witness.as_ref().map(|s| norm_residual(s, &m)).transpose()?;
            (serde_json::to_value(report).expect("serializable"), residual)
        }
        Command::Witness => match witness_spline(class(p), &m, config) {
            Ok(s) => {
                let residual = norm_residual(&s, &m)?;
                (json!({ "status": "admissible", "knot_count": s.knot_count(), "spline": s }), Some(residual))
            }
            Err(e) if not_admissible(&e) => (json!({ "status": "not_admissible" }), None),
            Err(e) => return Err(e.into()),
        },
        Command::Represent | Command::Canonical => {
            let res = if command == Command::Represent {
                cone::principal_representation(&cm, config)
            } else {
                cone::canonical_representation(&cm, required(p.t_star, "t_star")?, config)
            };
            match res {
                Ok(w) => {
                    let residual = cone::measure_residual(&w, &cm);
                    (json!({ "status": "interior", "index": w.index(), "atoms": w }), Some(residual))
                }
                Err(Error::NotInterior) => (json!({ "status": "not_interior" }), None),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Interpolate => match smoothest_interpolant(class(p), &m, config) {
            Ok(rep) => {
                let residual = norm_residual(&rep.spline, &m)?;
                (serde_json::to_value(rep).expect("serializable"), Some(residual))
            }
            Err(e) if not_admissible(&e) => (json!({ "status": "not_admissible" }), None),
            Err(e) => return Err(e.into()),
        },
        Command::MomentBound => match intermediate_moment_bound(class(p), &m, required(p.p, "p")?, config) {
            Ok(rep) => {
                let residual = norm_residual(&rep.spline, &m)?;
                (serde_json::to_value(rep).expect("serializable"), Some(residual))
            }
            Err(e) if not_admissible(&e) => (json!({ "status": "not_admissible" }), None),
            Err(e) => return Err(e.into()),
        },
        Command::ExtremalDist => {
            if p.class == Some(SplineClass::Cm) {
                return Err(input_error("extremal distributions are defined for the mm class"));
            }
            match extremal_distribution(&m, required(p.a, "A")?, config) {
                Ok(rep) => {
                    let residual = norm_residual(&rep.spline, &m)?;
                    (serde_json::to_value(rep).expect("serializable"), Some(residual))
                }
                Err(e @ (Error::NotAdmissible | Error::EmptyFamily)) => {
                    (json!({ "status": if not_admissible(&e) { "not_admissible" } else { "empty_family" } }), None)
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::FamilySample | Command::Norms => unreachable!("handled above"),
    };
    Ok((result, residual, diagnostics))
}

fn run_problem(p: &Problem, base: &SolverConfig) -> (Value, i32) {
    let start = Instant::now();
    let config = p.solver.clone().unwrap_or_else(|| base.clone());
    let outcome = config.validate().map_err(Failure::from).and_then(|_| solve(p, &config));
    let mut report = serde_json::Map::new();
    report.insert("command".into(), serde_json::to_value(p.command).expect("serializable"));
    report.insert("input".into(), serde_json::to_value(p).expect("serializable"));
    let code = match outcome {
        Ok((result, residual, diagnostics)) => {
            report.insert("result".into(), result);
            if let Some(r) = residual {
                report.insert("residual".into(), json!(r));
            }
            if let Some(d) = diagnostics {
                report.insert("diagnostics".into(), d);
            }
            EXIT_OK
        }
        Err(f) => {
            report.insert("error".into(), f.error);
            f.code
        }
    };
    report.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    (Value::Object(report), code)
}

/// Parses `args` (including the program name), runs, and writes the report.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let (command, flags) = cli.command.split();
    let setup = (|| {
        let base = match &flags.config {
            Some(path) => parse::<SolverConfig>(read_json(path)?, "config")?,
            None => SolverConfig::default(),
        };
        let batch = flags.file.as_ref().map(|f| read_json(f).map(|v| v.is_array())).transpose()?.unwrap_or(false);
        Ok::<_, Failure>((base, problems_from(command, &flags)?, batch))
    })();
    let (base, problems, batch) = match setup {
        Ok(s) => s,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error["message"].as_str().unwrap_or_default());
            return f.code;
        }
    };

    let results: Vec<(Value, i32)> = problems.par_iter().map(|p| run_problem(p, &base)).collect();
    for (report, code) in &results {
        if *code != EXIT_OK {
            let _ = writeln!(err, "error: {}", report["error"]["message"].as_str().unwrap_or_default());
        }
    }
    let code = results.iter().map(|r| r.1).max().unwrap_or(EXIT_OK);
    let reports: Vec<Value> = results.into_iter().map(|r| r.0).collect();
    let doc = if batch { Value::Array(reports) } else { reports.into_iter().next().unwrap_or(Value::Null) };
    let text = if flags.pretty { serde_json::to_string_pretty(&doc) } else { serde_json::to_string(&doc) };
    let _ = writeln!(out, "{}", text.expect("serializable"));
    code
}
