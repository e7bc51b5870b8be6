//! Command-line front end: matrix files, reports, and ensemble drivers.
//!
//! Matrix files are either JSON with a `rows` key, each entry a real number
//! or an `[re, im]` pair, or plain CSV of reals with one row per line. The
//! path `-` reads standard input.
//!
//! Exit codes: 0 success, 1 property violations found, 2 input or usage
//! error, 3 numerical failure, 4 matrix not nilpotent.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{full_report, BoundEstimate, BoundReport, ReportConfig, ReversePowerCheck, Violation};
use crate::error::{Error, ParseErrorKind, Result};
use crate::harness::{matrix_rows, run_property_suite, sharpness_study, EnsembleConfig, EnsembleStats, MatrixKind};
use crate::matrix::{Complex, Matrix};
use crate::radius::SweepResult;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_NILPOTENT: i32 = 4;

pub const SEED_ENV: &str = "NUMRAD_SEED";

pub const SHARPNESS_HEADER: &str = "dim,kind,bound_id,count,mean_ratio,max_ratio,min_slack";

// ---------------------------------------------------------------------------
// matrix files

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Entry> for Complex {
    fn from(e: Entry) -> Complex {
        match e {
            Entry::Real(re) => Complex::new(re, 0.0),
            Entry::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    #[serde(default)]
    dim: Option<usize>,
    rows: Vec<Vec<Entry>>,
}

fn parse_error(kind: ParseErrorKind, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        kind,
        line,
        column,
        message: message.into(),
    }
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Positions of the opening bracket of each row inside the `rows` array.
fn row_positions(text: &str) -> Vec<(usize, usize)> {
    let Some(key) = text.find("\"rows\"") else {
        return Vec::new();
    };
    let mut depth = 0usize;
    let mut out = Vec::new();
    for (i, ch) in text[key..].char_indices() {
        match ch {
            '[' => {
                depth += 1;
                if depth == 2 {
                    out.push(position(text, key + i));
                }
            }
            ']' => {
                if depth <= 1 {
                    break;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    out
}

fn parse_json(text: &str) -> Result<Matrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let kind = if msg.contains("out of range") {
            ParseErrorKind::NonFiniteEntry
        } else {
            ParseErrorKind::Malformed
        };
        parse_error(kind, e.line(), e.column(), msg)
    })?;
    let positions = row_positions(text);
    let at = |i: usize| positions.get(i).copied().unwrap_or((1, 1));
    let n = file.rows.len();
    if n == 0 {
        let (line, column) = position(text, text.find("\"rows\"").unwrap_or(0));
        return Err(parse_error(ParseErrorKind::NotSquare, line, column, "no rows"));
    }
    if let Some(dim) = file.dim.filter(|&d| d != n) {
        let (line, column) = at(0);
        return Err(parse_error(
            ParseErrorKind::NotSquare,
            line,
            column,
            format!("dim is {dim} but {n} rows given"),
        ));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in file.rows.into_iter().enumerate() {
        if row.len() != n {
            let (line, column) = at(i);
            return Err(parse_error(
                ParseErrorKind::NotSquare,
                line,
                column,
                format!("row {} has {} entries, expected {n}", i + 1, row.len()),
            ));
        }
        data.extend(row.into_iter().map(Complex::from));
    }
    Matrix::new(n, data)
}

fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for field in line.split(',') {
            let trimmed = field.trim();
            let col = column + (field.len() - field.trim_start().len());
            let value: f64 = trimmed.parse().map_err(|_| {
                parse_error(
                    ParseErrorKind::Malformed,
                    lineno,
                    col,
                    format!("`{trimmed}` is not a number"),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_error(
                    ParseErrorKind::NonFiniteEntry,
                    lineno,
                    col,
                    format!("`{trimmed}`"),
                ));
            }
            row.push(value);
            column += field.len() + 1;
        }
        rows.push((lineno, row));
    }
    let n = rows.len();
    if n == 0 {
        return Err(parse_error(ParseErrorKind::Malformed, 1, 1, "empty input"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (lineno, row) in rows {
        if row.len() != n {
            return Err(parse_error(
                ParseErrorKind::NotSquare,
                lineno,
                1,
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        data.extend(row.into_iter().map(|re| Complex::new(re, 0.0)));
    }
    Matrix::new(n, data)
}

/// Parses matrix text in either supported format.
pub fn parse_matrix_str(text: &str) -> Result<Matrix> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

/// Reads and parses a matrix file; `-` reads standard input.
pub fn parse_matrix(path: &str) -> Result<Matrix> {
    let io_err = |e: io::Error| Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    };
    let text = if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(io_err)?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(io_err)?
    };
    parse_matrix_str(&text)
}

/// JSON matrix file with `[re, im]` entries at full precision.
pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::json!({ "dim": m.dim(), "rows": matrix_rows(m) }).to_string()
}

// ---------------------------------------------------------------------------
// report document

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub source: String,
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Every estimate is at least `w - tol`.
    pub bounds_hold: bool,
    /// `certified_error <= tol`.
    pub certified: bool,
    /// Smallest estimate.
    pub tightest: Option<String>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub input: InputDescriptor,
    pub tol: f64,
    pub exact: SweepResult,
    pub norm: f64,
    pub classical_lower: f64,
    pub classical_upper: f64,
    pub estimates: Vec<BoundEstimate>,
    pub nilpotency_index: Option<usize>,
    pub reverse_power: Vec<ReversePowerCheck>,
    pub verdicts: Verdicts,
}

fn tightest(estimates: &[BoundEstimate]) -> Option<&BoundEstimate> {
    estimates
        .iter()
        .fold(None, |best: Option<&BoundEstimate>, e| match best {
            Some(b) if b.value <= e.value => Some(b),
            _ => Some(e),
        })
}

impl ReportDocument {
    pub fn new(source: &str, m: &Matrix, tol: f64, report: BoundReport) -> Self {
        let verdicts = Verdicts {
            bounds_hold: report.violations.is_empty(),
            certified: report.exact.certified_error <= tol,
            tightest: tightest(&report.estimates).map(|e| e.id.clone()),
            violations: report.violations,
        };
        ReportDocument {
            input: InputDescriptor {
                source: source.to_string(),
                dim: m.dim(),
                rows: matrix_rows(m),
            },
            tol,
            exact: report.exact,
            norm: report.norm,
            classical_lower: report.classical_lower,
            classical_upper: report.classical_upper,
            estimates: report.estimates,
            nilpotency_index: report.nilpotency_index,
            reverse_power: report.reverse_power,
            verdicts,
        }
    }

    pub fn matrix(&self) -> Result<Matrix> {
        let data = self
            .input
            .rows
            .iter()
            .flatten()
            .map(|&[re, im]| Complex::new(re, im))
            .collect();
        Matrix::new(self.input.dim, data)
    }

    pub fn to_structured(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_structured(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| parse_error(ParseErrorKind::Malformed, e.line(), e.column(), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "input            {} ({0}x{0})", self.input.dim);
        let _ = writeln!(s, "source           {}", self.input.source);
        let _ = writeln!(s, "tol              {}", num(self.tol));
        let _ = writeln!(s, "w(T)             {}", num(self.exact.value));
        let _ = writeln!(s, "theta*           {}", num(self.exact.theta_star));
        let _ = writeln!(s, "certified error  {}", num(self.exact.certified_error));
        let _ = writeln!(s, "||T||            {}", num(self.norm));
        match self.nilpotency_index {
            Some(k) => {
                let _ = writeln!(s, "nilpotent        index {k}");
            }
            None => {
                let _ = writeln!(s, "nilpotent        no");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<20} {:>24} {:>24}  formula", "bound", "value", "value - w");
        for e in &self.estimates {
            let _ = writeln!(
                s,
                "{:<20} {:>24} {:>24}  {}",
                e.id,
                num(e.value),
                num(e.value - self.exact.value),
                e.formula
            );
        }
        if !self.reverse_power.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "{:<20} {:>24} {:>24}", "reverse power", "lhs", "rhs");
            for c in &self.reverse_power {
                let _ = writeln!(s, "{:<20} {:>24} {:>24}", format!("n={}", c.order), num(c.lhs), num(c.rhs));
            }
        }
        let _ = writeln!(s);
        if let Some(t) = &self.verdicts.tightest {
            let _ = writeln!(s, "tightest         {t}");
        }
        let _ = writeln!(
            s,
            "verdict          {}",
            if self.verdicts.bounds_hold { "all bounds hold" } else { "VIOLATION" }
        );
        for v in &self.verdicts.violations {
            let _ = writeln!(s, "violation        {} {}", v.id, num(v.margin));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("id,value,formula\n");
        let mut row = |id: &str, value: f64, formula: &str| {
            let _ = writeln!(s, "{},{},{}", csv_field(id), num(value), csv_field(formula));
        };
        row("w", self.exact.value, "max over theta of lambda_max(Re(e^{i theta} T))");
        row("certified_error", self.exact.certified_error, "");
        row("norm", self.norm, "||T||");
        for e in &self.estimates {
            row(&e.id, e.value, &e.formula);
        }
        s
    }
}

/// Scientific notation with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// ensemble summaries

/// Per-inequality summary over all cells, sorted by id.
pub fn stats_summary(stats: &EnsembleStats) -> String {
    let c = &stats.config;
    let mut s = String::new();
    let dims: Vec<String> = c.dims.iter().map(usize::to_string).collect();
    let kinds: Vec<&str> = c.kinds.iter().map(|k| k.name()).collect();
    let _ = writeln!(
        s,
        "seed {} dims {} kinds {} trials {} tol {}",
        c.seed,
        dims.join(","),
        kinds.join(","),
        c.trials_per_cell,
        num(c.tol)
    );
    let _ = writeln!(s, "{:<24} {:>8} {:>24} {:>24}", "inequality", "checks", "min slack", "max ratio");
    for id in stats.ids() {
        let cells: Vec<_> = stats.cells_for(&id).collect();
        let count: usize = cells.iter().map(|c| c.count).sum();
        let min_slack = cells.iter().map(|c| c.min_slack).fold(f64::INFINITY, f64::min);
        let max_ratio = cells.iter().filter_map(|c| c.max_ratio).reduce(f64::max);
        let _ = writeln!(s, "{:<24} {:>8} {:>24} {:>24}", id, count, num(min_slack), opt_num(max_ratio));
    }
    let _ = writeln!(s, "violations {}", stats.violations.len());
    for v in &stats.violations {
        let _ = writeln!(
            s,
            "  {} dim {} {} trial {} slack {} matrix {}",
            v.id,
            v.dim,
            v.kind,
            v.trial,
            num(v.slack),
            serde_json::to_string(&v.matrix).expect("matrix serializes")
        );
    }
    s
}

/// One CSV row per (dim, kind, bound id); see [`SHARPNESS_HEADER`].
pub fn sharpness_csv(stats: &EnsembleStats) -> String {
    let mut s = format!("{SHARPNESS_HEADER}\n");
    for c in &stats.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            c.dim,
            c.kind,
            csv_field(&c.id),
            c.count,
            opt_num(c.mean_ratio),
            opt_num(c.max_ratio),
            num(c.min_slack)
        );
    }
    s
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Parser, Debug)]
#[command(name = "numrad", version, about = "Certified numerical radius and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact radius and every upper bound for one matrix.
    Bounds {
        path: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        orders: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Randomized property suite.
    Verify {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_enum, default_value_t = SummaryFormat::Text)]
        format: SummaryFormat,
    },
    /// Compare the nilpotent-operator estimates.
    Nilpotent {
        path: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Bound/radius ratio table as CSV.
    Sharpness {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Structured,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SummaryFormat {
    Text,
    Structured,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Comma-separated dimensions; `a-b` ranges allowed.
    #[arg(long, default_value = "2-6")]
    dims: String,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    kinds: Vec<MatrixKind>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

fn parse_kind(s: &str) -> std::result::Result<MatrixKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut dims = Vec::new();
    for part in s.split(',').map(str::trim) {
        let bad = || format!("invalid dimension `{part}`");
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                dims.extend(a..=b);
            }
            None => dims.push(part.parse().map_err(|_| bad())?),
        }
    }
    if dims.contains(&0) {
        return Err("dimensions must be at least 1".into());
    }
    Ok(dims)
}

impl EnsembleArgs {
    fn config(&self) -> std::result::Result<EnsembleConfig, String> {
        let seed = match self.seed {
            Some(seed) => seed,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| format!("{SEED_ENV}=`{v}` is not an integer"))?,
                Err(_) => EnsembleConfig::default().seed,
            },
        };
        let config = EnsembleConfig {
            dims: parse_dims(&self.dims)?,
            kinds: if self.kinds.is_empty() {
                MatrixKind::ALL.to_vec()
            } else {
                self.kinds.clone()
            },
            trials_per_cell: self.trials,
            seed,
            tol: self.tol,
        };
        if config.trials_per_cell == 0 {
            return Err("--trials must be at least 1".into());
        }
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

// ---------------------------------------------------------------------------
// commands

struct Failure {
    code: i32,
    message: String,
}

fn input_failure(e: impl ToString) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

fn numerical_failure(e: Error) -> Failure {
    let code = match e {
        Error::InvalidTolerance(_) | Error::InvalidOrder(_) => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn report_for(path: &str, tol: Option<f64>, orders: Vec<usize>) -> std::result::Result<(Matrix, ReportDocument), Failure> {
    let m = parse_matrix(path).map_err(input_failure)?;
    let mut config = ReportConfig::for_matrix(&m).map_err(numerical_failure)?;
    if let Some(tol) = tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(input_failure(Error::InvalidTolerance(tol)));
        }
        config.tol = tol;
    }
    if let Some(&n) = orders.iter().find(|&&n| n < 2) {
        return Err(input_failure(Error::InvalidOrder(n)));
    }
    config.orders = orders;
    let report = full_report(&m, &config).map_err(numerical_failure)?;
    let doc = ReportDocument::new(path, &m, config.tol, report);
    Ok((m, doc))
}

fn cmd_bounds(
    path: &str,
    tol: Option<f64>,
    orders: Vec<usize>,
    format: Format,
    out: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    let (_, doc) = report_for(path, tol, orders)?;
    let text = match format {
        Format::Text => doc.to_text(),
        Format::Structured => doc.to_structured() + "\n",
        Format::Csv => doc.to_csv(),
    };
    out.write_all(text.as_bytes()).map_err(input_failure)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &EnsembleArgs, format: SummaryFormat, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let config = args.config().map_err(input_failure)?;
    let stats = run_property_suite(&config).map_err(numerical_failure)?;
    let text = match format {
        SummaryFormat::Text => stats_summary(&stats),
        SummaryFormat::Structured => serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n",
    };
    out.write_all(text.as_bytes()).map_err(input_failure)?;
    Ok(if stats.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    })
}

fn cmd_nilpotent(path: &str, tol: Option<f64>, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let (_, doc) = report_for(path, tol, vec![2, 3, 4, 5])?;
    let Some(index) = doc.nilpotency_index else {
        return Err(Failure {
            code: EXIT_NOT_NILPOTENT,
            message: Error::NotNilpotent.to_string(),
        });
    };
    let ids = ["nilpotent-tight", "nilpotent-relaxed", "haagerup", "th1"];
    let rows: Vec<&BoundEstimate> = ids
        .iter()
        .filter_map(|id| doc.estimates.iter().find(|e| e.id == *id))
        .collect();
    let w = doc.exact.value;
    let slack = doc.tol + doc.exact.certified_error;
    let best = rows.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let tied: Vec<&str> = rows
        .iter()
        .filter(|e| e.value <= best + slack)
        .map(|e| e.id.as_str())
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, "nilpotency index   {index}");
    let _ = writeln!(s, "w(T)               {}", num(w));
    let _ = writeln!(s, "||T||              {}", num(doc.norm));
    for e in &rows {
        let _ = writeln!(s, "{:<18} {}", e.id, num(e.value));
    }
    let _ = writeln!(s, "tightest           {}", tied.join(" = "));
    if tied.len() > 1 {
        let _ = writeln!(s, "tie                {} estimators agree within {}", tied.len(), num(slack));
    }
    if best - w <= slack {
        let _ = writeln!(s, "sharp              yes (bound equals w(T) within {})", num(slack));
    } else {
        let _ = writeln!(s, "sharp              no (gap {})", num(best - w));
    }
    out.write_all(s.as_bytes()).map_err(input_failure)?;
    Ok(EXIT_OK)
}

fn cmd_sharpness(args: &EnsembleArgs, path: Option<&str>, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let config = args.config().map_err(input_failure)?;
    let stats = sharpness_study(&config).map_err(numerical_failure)?;
    let csv = sharpness_csv(&stats);
    match path {
        Some(p) if p != "-" => std::fs::write(p, csv).map_err(|e| {
            input_failure(Error::Io {
                path: p.to_string(),
                message: e.to_string(),
            })
        })?,
        _ => out.write_all(csv.as_bytes()).map_err(input_failure)?,
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first), writing normal output
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Bounds {
            path,
            tol,
            orders,
            format,
        } => cmd_bounds(&path, tol, orders, format, out),
        Command::Verify { ensemble, format } => cmd_verify(&ensemble, format, out),
        Command::Nilpotent { path, tol } => cmd_nilpotent(&path, tol, out),
        Command::Sharpness { ensemble, out: path } => cmd_sharpness(&ensemble, path.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
