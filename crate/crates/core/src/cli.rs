//! Command-line front end.
//!
//! Exit codes: 0 success, 1 computation failure (including failed checks in
//! `verify`), 2 usage error. JSON output carries `"schema": "stepfact/1"`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bernoulli::{bernoulli_table, format_fraction};
use crate::error::{Error, Result};
use crate::eulermaclaurin::constants_abc;
use crate::identities::{run_suite, IdentityReport, SuiteConfig, SCHEMA};
use crate::interpolation::{half_index_k, log_value_at, Route};
use crate::quadrature::{pq_pair, rule_for, BetaIntegralSpec, DEFAULT_REL_TOL};
use crate::stepproducts::{finite_product, log_finite_product, FormKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "STEPFACT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Gamma,
    Delta,
    Theta,
}

impl From<FormArg> for FormKind {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Gamma => FormKind::Gamma,
            FormArg::Delta => FormKind::Delta,
            FormArg::Theta => FormKind::Theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    All,
    Quadrature,
    Product,
    Em,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Bernoulli,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a finite number > 0, got {s}"))
    }
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "stepfact", version, about = "Step-factorial products, their interpolation and identities")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (default: text; csv for `table`).
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the output to a file instead of stdout.
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct FormParams {
    #[arg(long, value_enum)]
    pub form: FormArg,
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PairParams {
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Finite product with an integer number of factors.
    Eval {
        #[command(flatten)]
        params: FormParams,
        #[arg(long)]
        x: u64,
    },
    /// Product at a real index x > 0.
    Interpolate {
        #[command(flatten)]
        params: FormParams,
        #[arg(long, value_parser = positive, allow_negative_numbers = true)]
        x: f64,
    },
    /// Half-index value k = Delta(1/2).
    K {
        #[command(flatten)]
        params: PairParams,
        #[arg(long, value_enum, default_value = "quadrature")]
        routes: RouteArg,
    },
    /// Asymptotic constants A, B, C.
    Constants {
        #[command(flatten)]
        params: PairParams,
    },
    /// Beta-type integral int_0^1 x^(p-1) (1-x^n)^(m/n-1) dx, or the P, Q pair.
    Integrate {
        #[arg(long, value_parser = positive, allow_negative_numbers = true, required_unless_present = "pq", conflicts_with = "pq", requires_all = ["m", "n"])]
        p: Option<f64>,
        #[arg(long, value_parser = positive, allow_negative_numbers = true, requires = "p")]
        m: Option<f64>,
        #[arg(long, value_parser = positive, allow_negative_numbers = true, requires = "p")]
        n: Option<f64>,
        /// Integrate P and Q for the step pair (a, b).
        #[arg(long, requires_all = ["a", "b"])]
        pq: bool,
        #[arg(long, value_parser = positive, allow_negative_numbers = true, requires = "pq")]
        a: Option<f64>,
        #[arg(long, value_parser = positive, allow_negative_numbers = true, requires = "pq")]
        b: Option<f64>,
        #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_REL_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Run the identity suite; exits 1 if any check fails.
    Verify {
        /// Points per axis of the log-spaced (a, b) grid.
        #[arg(long, default_value_t = 6)]
        grid: usize,
        #[arg(long, default_value_t = 0.25, value_parser = positive)]
        lo: f64,
        #[arg(long, default_value_t = 8.0, value_parser = positive)]
        hi: f64,
        #[arg(long = "no-reduction")]
        no_reduction: bool,
        #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_REL_TOL, value_parser = positive)]
        tol: f64,
        /// Also write the full suite report as JSON to this path.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Exact tables.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[arg(long = "max", default_value_t = 12)]
        max: usize,
    },
}

impl CliConfig {
    fn format(&self) -> OutputFormat {
        self.output.unwrap_or(match self.command {
            Command::Table { .. } => OutputFormat::Csv,
            _ => OutputFormat::Text,
        })
    }
}

/// Parses an argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliConfig::try_parse_from(argv)
}

/// A scalar or text cell of a tabular output row.
#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

type Row = Vec<(String, Cell)>;

macro_rules! row {
    ($($k:expr => $v:expr),* $(,)?) => {
        vec![$(($k.to_string(), Cell::from($v))),*]
    };
}

/// Ten significant digits; fixed notation for moderate magnitudes.
pub fn format_text(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs();
    if mag == 0.0 || (1e-3..1e6).contains(&mag) {
        format!("{v:.10}")
    } else {
        format!("{v:.9e}")
    }
}

/// Seventeen significant digits.
pub fn format_csv(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format_text(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => "-".into(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_csv(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Null => String::new(),
            other => other.text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Null => Value::Null,
        }
    }
}

/// Result of one command: its rows, and optionally a richer JSON body.
struct Payload {
    command: &'static str,
    rows: Vec<Row>,
    /// Replaces `rows` in text output.
    text_rows: Option<Vec<Row>>,
    json: Option<Value>,
    exit: i32,
}

impl Payload {
    fn single(command: &'static str, row: Row) -> Self {
        Self {
            command,
            rows: vec![row],
            text_rows: None,
            json: None,
            exit: EXIT_OK,
        }
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let rows = self.text_rows.as_ref().unwrap_or(&self.rows);
                let mut s = String::new();
                if rows.len() == 1 {
                    for (k, v) in &rows[0] {
                        s.push_str(&format!("{k}={}\n", v.text()));
                    }
                } else {
                    for row in rows {
                        let line: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
                        s.push_str(&line.join(" "));
                        s.push('\n');
                    }
                }
                s
            }
            OutputFormat::Csv => {
                let mut s = String::new();
                if let Some(first) = self.rows.first() {
                    let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
                    s.push_str(&header.join(","));
                    s.push('\n');
                }
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|(_, v)| v.csv()).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            OutputFormat::Json => {
                let mut obj = Map::new();
                obj.insert("schema".into(), json!(SCHEMA));
                obj.insert("command".into(), json!(self.command));
                match &self.json {
                    Some(Value::Object(body)) => obj.extend(body.clone()),
                    Some(other) => {
                        obj.insert("result".into(), other.clone());
                    }
                    None if self.rows.len() == 1 => {
                        obj.extend(self.rows[0].iter().map(|(k, v)| (k.clone(), v.json())));
                    }
                    None => {
                        let rows: Vec<Value> = self
                            .rows
                            .iter()
                            .map(|r| Value::Object(r.iter().map(|(k, v)| (k.clone(), v.json())).collect()))
                            .collect();
                        obj.insert("rows".into(), Value::Array(rows));
                    }
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn execute(command: &Command) -> Result<Payload> {
    match command {
        Command::Eval { params, x } => {
            let form = FormKind::from(params.form);
            let seq = form.sequence(params.a, params.b)?;
            let log_value = log_finite_product(&seq, *x);
            let value = match finite_product(&seq, *x) {
                Ok(v) => Some(v),
                Err(Error::Overflow { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Payload::single(
                "eval",
                row!["form" => form.name(), "a" => params.a, "b" => params.b, "x" => *x, "value" => value, "log_value" => log_value],
            ))
        }
        Command::Interpolate { params, x } => {
            let form = FormKind::from(params.form);
            let log_value = log_value_at(form, params.a, params.b, *x)?;
            let value = log_value.exp();
            Ok(Payload::single(
                "interpolate",
                row!["form" => form.name(), "a" => params.a, "b" => params.b, "x" => *x,
                     "value" => value.is_finite().then_some(value), "log_value" => log_value],
            ))
        }
        Command::K { params, routes } => {
            let r = half_index_k(params.a, params.b)?;
            let wanted = |route: Route| match routes {
                RouteArg::All => true,
                RouteArg::Quadrature => route == Route::Quadrature,
                RouteArg::Product => route == Route::Product,
                RouteArg::Em => route == Route::Em,
            };
            let mut row = row!["a" => params.a, "b" => params.b, "k" => r.consensus];
            let mut route_obj = Map::new();
            for (route, value) in [
                (Route::Quadrature, r.k_quadrature),
                (Route::Product, r.k_product),
                (Route::Em, r.k_em),
            ] {
                if wanted(route) {
                    let key = serde_json::to_value(route).expect("route names serialize");
                    let key = key.as_str().unwrap_or_default().to_owned();
                    row.push((format!("k_{key}"), Cell::from(value)));
                    route_obj.insert(key, json!(value));
                }
            }
            if *routes == RouteArg::All {
                row.push(("max_spread".into(), Cell::from(r.max_spread)));
            }
            let mut body = Map::new();
            body.insert("a".into(), json!(params.a));
            body.insert("b".into(), json!(params.b));
            body.insert("k".into(), json!(r.consensus));
            body.insert("routes".into(), Value::Object(route_obj));
            if *routes == RouteArg::All {
                body.insert("max_spread".into(), json!(r.max_spread));
            }
            body.insert("errors".into(), serde_json::to_value(&r.errors).expect("errors serialize"));
            Ok(Payload {
                command: "k",
                rows: vec![row],
                text_rows: None,
                json: Some(Value::Object(body)),
                exit: EXIT_OK,
            })
        }
        Command::Constants { params } => {
            let c = constants_abc(params.a, params.b)?;
            Ok(Payload::single(
                "constants",
                row!["a" => params.a, "b" => params.b, "A" => c.a_const(), "B" => c.b_const(), "C" => c.c_const(),
                     "log_A" => c.log_a_const, "log_B" => c.log_b_const, "log_C" => c.log_c_const,
                     "precision_warning" => c.precision_warning],
            ))
        }
        Command::Integrate { p, m, n, pq, a, b, tol } => {
            if *pq {
                let (a, b) = (a.expect("clap requires a"), b.expect("clap requires b"));
                let (pr, qr) = pq_pair(a, b, *tol)?;
                let k = (a * pr.value / qr.value).sqrt();
                Ok(Payload::single(
                    "integrate",
                    row!["a" => a, "b" => b, "P" => pr.value, "Q" => qr.value, "ratio" => pr.value / qr.value, "k" => k,
                         "P_error_estimate" => pr.error_estimate, "Q_error_estimate" => qr.error_estimate],
                ))
            } else {
                let spec = BetaIntegralSpec::new(
                    p.expect("clap requires p"),
                    m.expect("clap requires m"),
                    n.expect("clap requires n"),
                )?;
                let r = rule_for::<f64>().integrate(&spec, *tol)?;
                Ok(Payload::single(
                    "integrate",
                    row!["p" => spec.p, "m" => spec.m, "n" => spec.n, "value" => r.value,
                         "error_estimate" => r.error_estimate, "levels_used" => r.levels_used, "node_count" => r.node_count],
                ))
            }
        }
        Command::Verify {
            grid,
            lo,
            hi,
            no_reduction,
            tol,
            json: json_path,
        } => {
            let config = SuiteConfig {
                name: format!("grid{grid}"),
                grid_points: *grid,
                lo: *lo,
                hi: *hi,
                include_reduction: !no_reduction,
                rel_tol: *tol,
                ..SuiteConfig::default()
            };
            let suite = run_suite(&config);
            if let Some(path) = json_path {
                fs::write(path, serde_json::to_string_pretty(&suite).expect("suite serializes"))?;
            }
            let rows: Vec<Row> = suite.reports.iter().map(report_row).collect();
            let mut text_rows =
                vec![row!["suite" => suite.suite.as_str(), "pass" => suite.summary.pass, "fail" => suite.summary.fail]];
            text_rows.extend(suite.failures().map(report_row));
            Ok(Payload {
                command: "verify",
                rows,
                text_rows: Some(text_rows),
                json: Some(serde_json::to_value(&suite).expect("suite serializes")),
                exit: if suite.all_pass() { EXIT_OK } else { EXIT_FAILURE },
            })
        }
        Command::Table { kind: TableKind::Bernoulli, max } => {
            let t = bernoulli_table(*max)?;
            let rows = t
                .entries()
                .iter()
                .enumerate()
                .map(|(n, b)| {
                    row!["n" => n, "numerator" => b.numer().to_string(), "denominator" => b.denom().to_string(),
                         "fraction" => format_fraction(b)]
                })
                .collect();
            Ok(Payload {
                command: "table",
                rows,
                text_rows: None,
                json: None,
                exit: EXIT_OK,
            })
        }
    }
}

fn report_row(r: &IdentityReport) -> Row {
    let param = |key: &str| r.metadata.get(key).and_then(Value::as_f64);
    row!["name" => r.name.as_str(), "a" => param("a"), "b" => param("b"),
         "lhs" => r.lhs, "rhs" => r.rhs, "rel_residual" => r.rel_residual,
         "tolerance" => r.tolerance, "pass" => r.pass]
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Executes a parsed configuration, writing to `stdout` (or `--out`) and
/// diagnostics to `stderr`. Returns the process exit code.
pub fn run(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let format = config.format();
    let payload = match execute(&config.command) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = payload.render(format);
    let written = match &config.out_path {
        Some(path) => fs::write(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILURE;
    }
    payload.exit
}

/// Parses and runs; usage errors print clap's message and return its exit code
/// (0 for `--help` and `--version`, 2 otherwise).
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config, stdout, stderr),
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            if code == EXIT_OK {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
    }
}

