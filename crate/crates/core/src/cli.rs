//! The `negtype` command line.
//!
//! Every command builds a [`Report`] and renders it as text (12 significant
//! digits) or JSON (shortest representation that parses back to the same
//! `f64`).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bound::Bound;
use crate::bounds::{construct_extremal, strictness_report, zeta};
use crate::error::Error;
use crate::gap::{gap_value, negative_type_gap, zero_gap, GapOptions, GapResult, DEFAULT_ENUMERATION_CAP};
use crate::io::{space_from_csv, space_from_json, space_to_json, ParseError};
use crate::metric::{scaled_diameter, Mode, SemiMetricSpace};
use crate::negative_type::{
    check_negative_type, check_strict_negative_type, max_negative_type, Certificate, DEFAULT_BISECTION_TOL,
    DEFAULT_EIGEN_TOL,
};
use crate::trees::{tree_metric, tree_one_gap, WeightedTree};

/// Trees up to this size are cross-checked against full enumeration.
const TREE_CHECK_MAX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "negtype", about = "Negative type and negative-type gaps of finite metric spaces")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: OutputFormat,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long = "format-in", value_enum, global = true)]
    format_in: Option<InputFormat>,
    /// Treat the input as a semi-metric (no triangle inequality).
    #[arg(long, global = true)]
    semimetric: bool,
    /// Worker threads for gap enumeration.
    #[arg(long, env = "NEGTYPE_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a distance matrix.
    Validate { file: PathBuf },
    /// Summary: scaled diameter, Γ⁰, ζ, maximal type and sampled strictness.
    Analyze { file: PathBuf },
    /// Maximal p-negative type by bisection.
    Maxp {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
    },
    /// Negative-type gap at exponent p by full enumeration.
    Gap {
        file: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long = "max-n", default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The lower bound ζ(n, 𝔇).
    Zeta {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        diameter: f64,
    },
    /// Extremal complete bipartite space, as space JSON.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        diameter: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 1-negative type gap of a weighted tree.
    TreeGap { treefile: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Analyze { .. } => "analyze",
            Command::Maxp { .. } => "maxp",
            Command::Gap { .. } => "gap",
            Command::Zeta { .. } => "zeta",
            Command::Construct { .. } => "construct",
            Command::TreeGap { .. } => "tree-gap",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: Value,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

/// Exit status and the text written to standard output / standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Input could not be read or failed validation.
    Input { name: &'static str, message: String },
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input { name: e.name(), message: e.to_string() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Space(e) => e.into(),
            other => Failure::Input { name: "FileError", message: other.to_string() },
        }
    }
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input { name: "FileError", message: format!("{}: {e}", path.display()) }
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: format!("UsageError: {text}") }
            };
        }
    };
    let command = cli.command.name();
    match dispatch(&cli) {
        Ok(Rendered::Report(report)) => Outcome { code: 0, stdout: render(&report, cli.format), stderr: String::new() },
        Ok(Rendered::Raw(text)) => Outcome { code: 0, stdout: text, stderr: String::new() },
        Err(Failure::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("UsageError: {msg}\n") },
        Err(Failure::Input { name, message }) => {
            let stdout = match cli.format {
                OutputFormat::Json => {
                    let v = json!({"command": command, "error": {"name": name, "message": message}});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                OutputFormat::Text => format!("command: {command}\nerror: {name}: {message}\n"),
            };
            Outcome { code: 1, stdout, stderr: String::new() }
        }
    }
}

enum Rendered {
    Report(Report),
    Raw(String),
}

fn load_space(cli: &Cli, path: &Path) -> Result<SemiMetricSpace, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    let format = match cli.format_in {
        Some(f) => f,
        None => match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(e) if e == "json" => InputFormat::Json,
            Some(e) if e == "csv" => InputFormat::Csv,
            _ => {
                return Err(Failure::Usage(format!(
                    "cannot infer input format of {}; pass --format-in",
                    path.display()
                )))
            }
        },
    };
    let mode_override = cli.semimetric.then_some(Mode::SemiMetric);
    Ok(match format {
        InputFormat::Json => space_from_json(&text, mode_override)?,
        InputFormat::Csv => space_from_csv(&text, mode_override.unwrap_or(Mode::Metric))?,
    })
}

fn digest(space: &SemiMetricSpace, path: &Path) -> Value {
    let mut v = json!({"source": path.display().to_string(), "n": space.n(), "mode": space.mode().as_str()});
    if let Some(labels) = space.labels() {
        v["labels"] = json!(labels);
    }
    v
}

fn mode_warnings(space: &SemiMetricSpace) -> Vec<String> {
    let mut w = Vec::new();
    if space.mode() == Mode::SemiMetric {
        w.push("semi-metric mode: triangle inequality not enforced".to_string());
    }
    w
}

fn bound_value(b: Bound) -> Value {
    serde_json::to_value(b).expect("bound")
}

fn certificate_value(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("certificate")
}

fn gap_value_json(space: &SemiMetricSpace, r: &GapResult, p: f64) -> Result<Map<String, Value>, Failure> {
    let b = gap_value(space, &r.witness_simplex, &r.witness_loads, p)?;
    let labels = |side: &[usize]| side.iter().map(|&v| space.label(v)).collect::<Vec<_>>();
    let mut m = Map::new();
    m.insert("p".into(), json!(p));
    m.insert("gamma_star".into(), json!(r.gamma_star));
    m.insert("implies_strict".into(), json!(r.gamma_star > 0.0));
    m.insert("method".into(), serde_json::to_value(r.method).expect("method"));
    m.insert("converged".into(), json!(r.converged));
    m.insert(
        "witness".into(),
        json!({
            "a_side": labels(r.witness_simplex.a_side()),
            "b_side": labels(r.witness_simplex.b_side()),
            "a_loads": r.witness_loads.m(),
            "b_loads": r.witness_loads.w(),
            "L": b.l,
            "R": b.r,
        }),
    );
    Ok(m)
}

fn dispatch(cli: &Cli) -> Result<Rendered, Failure> {
    let mut warnings = Vec::new();
    let mut results = Map::new();
    let command = cli.command.name().to_string();
    let inputs_digest = match &cli.command {
        Command::Validate { file } => {
            let space = load_space(cli, file)?;
            warnings.extend(mode_warnings(&space));
            let violations = space.triangle_violations();
            if space.mode() == Mode::SemiMetric && !violations.is_empty() {
                warnings.push(format!("{} triangle inequality violations", violations.len()));
            }
            results.insert("valid".into(), json!(true));
            results.insert(
                "triangle_violations".into(),
                json!(violations.iter().take(20).map(|&(i, j, k)| [i, j, k]).collect::<Vec<_>>()),
            );
            if space.n() >= 2 {
                results.insert("scaled_diameter".into(), json!(scaled_diameter(&space)?));
            }
            digest(&space, file)
        }
        Command::Analyze { file } => {
            let space = load_space(cli, file)?;
            warnings.extend(mode_warnings(&space));
            let n = space.n();
            if n < 2 {
                return Err(Error::TooFewPoints { n, min: 2 }.into());
            }
            results.insert("n".into(), json!(n));
            results.insert("scaled_diameter".into(), json!(scaled_diameter(&space)?));
            results.insert("gamma0".into(), json!(zero_gap(n)?));
            let z = if n >= 3 {
                let report = strictness_report(&space)?;
                if report.lower_bound_only {
                    warnings.push("metric with scaled diameter above 2: zeta is a lower bound only".into());
                }
                results.insert("zeta".into(), bound_value(report.zeta));
                report.zeta
            } else {
                warnings.push("zeta is not defined for two points".into());
                results.insert("zeta".into(), Value::Null);
                Bound::Unbounded
            };
            let mt = max_negative_type(&space, DEFAULT_BISECTION_TOL)?;
            results.insert("max_negative_type".into(), bound_value(mt.p_max));
            let samples: Vec<f64> = match z {
                Bound::Finite(z) => vec![0.5 * z, 0.9 * z, 0.99 * z, z],
                Bound::Unbounded => vec![0.0, 1.0, 2.0, 4.0],
            };
            let mut rows = Vec::new();
            for p in samples {
                let ordinary = check_negative_type(&space, p, DEFAULT_EIGEN_TOL)?.holds;
                let strict = check_strict_negative_type(&space, p, DEFAULT_EIGEN_TOL)?.holds;
                rows.push(json!({"p": p, "negative_type": ordinary, "strict": strict}));
            }
            results.insert("samples".into(), Value::Array(rows));
            digest(&space, file)
        }
        Command::Maxp { file, tol } => {
            let space = load_space(cli, file)?;
            warnings.extend(mode_warnings(&space));
            if !(*tol > 0.0) {
                return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
            }
            let r = max_negative_type(&space, *tol)?;
            results.insert("p_max".into(), bound_value(r.p_max));
            results.insert("bracket".into(), json!([r.bracket.0, bracket_hi(r.bracket.1)]));
            results.insert("tolerance".into(), json!(r.tolerance));
            if let Some(v) = &r.certificate {
                results.insert("failure_certificate".into(), certificate_value(&v.certificate));
            } else {
                warnings.push(format!("negative type holds up to the bracket cap p = {}", r.bracket.0));
            }
            digest(&space, file)
        }
        Command::Gap { file, p, max_n, seed } => {
            let space = load_space(cli, file)?;
            warnings.extend(mode_warnings(&space));
            if *p < 0.0 {
                return Err(Error::NegativeExponent(*p).into());
            }
            let opts =
                GapOptions { seed: *seed, enumeration_cap: *max_n, threads: cli.threads, ..GapOptions::default() };
            let r = negative_type_gap(&space, *p, &opts)?;
            if !r.converged {
                warnings.push("ConvergenceFailure: some simplex hit the iteration cap".into());
            }
            results = gap_value_json(&space, &r, *p)?;
            results.insert("seed".into(), json!(seed));
            digest(&space, file)
        }
        Command::Zeta { n, diameter } => {
            let z = zeta(*n, *diameter)?;
            results.insert("n".into(), json!(n));
            results.insert("diameter_ratio".into(), json!(diameter));
            results.insert("gamma0".into(), json!(zero_gap(*n)?));
            results.insert("zeta".into(), bound_value(z));
            if *diameter > 2.0 {
                warnings.push("scaled diameter above 2: zeta is optimal for semi-metrics only".into());
            }
            json!({"n": n, "diameter_ratio": diameter})
        }
        Command::Construct { n, diameter, out } => {
            let mode = if cli.semimetric { Mode::SemiMetric } else { Mode::Metric };
            let space = construct_extremal(*n, *diameter, mode)?;
            let text = space_to_json(&space);
            match out {
                None => return Ok(Rendered::Raw(format!("{text}\n"))),
                Some(path) => {
                    std::fs::write(path, format!("{text}\n")).map_err(|e| file_error(path, e))?;
                    results.insert("written".into(), json!(path.display().to_string()));
                    results.insert("zeta".into(), bound_value(zeta(*n, *diameter)?));
                }
            }
            json!({"n": n, "diameter_ratio": diameter, "mode": mode.as_str()})
        }
        Command::TreeGap { treefile } => {
            let text = std::fs::read_to_string(treefile).map_err(|e| file_error(treefile, e))?;
            let tree = WeightedTree::from_json(&text).map_err(|e| file_error(treefile, e))?;
            let gap = tree_one_gap(&tree)?;
            results.insert("tree_one_gap".into(), json!(gap));
            if tree.vertex_count <= TREE_CHECK_MAX {
                let space = tree_metric(&tree)?;
                let opts = GapOptions { threads: cli.threads, ..GapOptions::default() };
                let r = negative_type_gap(&space, 1.0, &opts)?;
                results.insert("enumerated_gap".into(), json!(r.gamma_star));
                results.insert("abs_difference".into(), json!((r.gamma_star - gap).abs()));
                let strict = check_strict_negative_type(&space, 1.0, DEFAULT_EIGEN_TOL)?.holds;
                results.insert("strict_one_negative_type".into(), json!(strict));
                if !r.converged {
                    warnings.push("ConvergenceFailure: some simplex hit the iteration cap".into());
                }
            } else {
                warnings.push(format!("enumeration cross-check skipped above {TREE_CHECK_MAX} vertices"));
            }
            json!({"source": treefile.display().to_string(), "n": tree.vertex_count, "edges": tree.edges.len()})
        }
    };
    Ok(Rendered::Report(Report { command, inputs_digest, results, warnings }))
}

fn bracket_hi(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("unbounded")
    }
}

fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(report).expect("report serializes")),
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "command: {}", report.command);
            write_text(&mut out, "input", &report.inputs_digest, 0);
            for (k, v) in &report.results {
                write_text(&mut out, k, v, 0);
            }
            for w in &report.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            out
        }
    }
}

/// `x` to `digits` significant digits, in plain or scientific notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        // Rounding can carry into a new leading digit; that is still the right value.
        s
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{e}")
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if n.is_f64() => format_sig(f, 12),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn write_text(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    if let Some(s) = scalar_text(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|i| scalar_text(i).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar_text).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", parts.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, item) in items.iter().enumerate() {
                write_text(out, &format!("[{i}]"), item, indent + 1);
            }
        }
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, item) in map {
                write_text(out, k, item, indent + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}
