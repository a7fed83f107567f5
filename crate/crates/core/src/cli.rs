//! Command-line front end. Every subcommand builds a [`Report`], a small
//! table with leading key/value metadata, which is then rendered as an
//! aligned text table, CSV, or JSON.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::explicit_formula::{
    li, load_zeros, riemann_approx, sieve_pi, ExplicitFormulaError, PrimeCounter, ZeroTable,
};
use crate::finite_field::{is_prime, make_field, prime_factors, FieldError};
use crate::motive::{format_complex, parse_motive, MotiveError};
use crate::variety::{
    count_affine, count_projective_space, count_projective_variety, parse_system,
    projective_space_closed_form, CountOptions, CountSequence, PolySystem, VarietyError,
    DEFAULT_WORK_LIMIT,
};
use crate::weil::{correction_term, hasse_alpha, predict_affine_count, WeilError};
use crate::zeta::{curve_denominator, rational_reconstruct, zeta_series, ZetaError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed report: {0}")]
    Report(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Weil(#[from] WeilError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Motive(#[from] MotiveError),
    #[error(transparent)]
    ExplicitFormula(#[from] ExplicitFormulaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "weil",
    version,
    about = "Point counts over finite fields, Frobenius eigenvalues, zeta functions, motives, and prime counting"
)]
pub struct Cli {
    /// Output format; defaults to table on a terminal and CSV otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CountingArgs {
    /// Maximum number of tuples a single count may enumerate.
    #[arg(long = "work-limit", default_value_t = DEFAULT_WORK_LIMIT)]
    pub work_limit: u64,
    /// Worker threads for enumeration (0 = all cores).
    #[arg(long, env = "WEIL_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Enumerate every tuple even when the equation separates.
    #[arg(long)]
    pub exhaustive: bool,
}

impl CountingArgs {
    fn options(&self) -> CountOptions {
        let workers = if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        };
        CountOptions {
            work_limit: self.work_limit,
            workers,
            exhaustive: self.exhaustive,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Brute-force point counts of a polynomial system over F_{p^n}.
    Count {
        /// Polynomial system file, one polynomial or equation per line.
        file: PathBuf,
        #[arg(long)]
        p: u64,
        /// Count over this single extension degree.
        #[arg(long, conflicts_with = "n_max")]
        n: Option<u32>,
        /// Count over every extension degree 1..=n-max.
        #[arg(long = "n-max")]
        n_max: Option<u32>,
        /// Number of variables (default: highest index used).
        #[arg(long)]
        vars: Option<usize>,
        /// Treat the system as homogeneous and count in projective space.
        #[arg(long)]
        projective: bool,
        #[command(flatten)]
        counting: CountingArgs,
    },
    /// Frobenius eigenvalue from N_1 and predicted affine counts of an
    /// elliptic curve, optionally compared with brute force.
    Predict {
        #[arg(long)]
        p: u64,
        /// Affine count over F_p; computed from --file when omitted.
        #[arg(long)]
        n1: Option<u64>,
        /// Curve file for the brute-force comparison column.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long = "n-max", default_value_t = 12)]
        n_max: u32,
        #[command(flatten)]
        counting: CountingArgs,
    },
    /// Rational zeta function of a curve from projective counts or a curve file.
    Zeta {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        genus: u32,
        /// Comma-separated projective counts N_1, N_2, ...
        #[arg(long, value_delimiter = ',', conflicts_with = "file")]
        counts: Option<Vec<u64>>,
        /// Affine plane curve file to count.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Points at infinity added to every affine count from --file.
        #[arg(long = "points-at-infinity", default_value_t = 1)]
        points_at_infinity: u64,
        /// Extensions to count from --file (default 2*genus + 4).
        #[arg(long = "n-max")]
        n_max: Option<u32>,
        #[command(flatten)]
        counting: CountingArgs,
    },
    /// Build a motive from an expression and list its pieces and point counts.
    Motive {
        /// Expression such as "P^2", "L^3 + 1", "elliptic a=-2 p=2".
        expr: String,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long = "n-max", default_value_t = 5)]
        n_max: u32,
    },
    /// Point count of P^dim over F_q by enumeration.
    Pspace {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        q: u64,
    },
    /// Prime counting function against li and the truncated explicit formula.
    Pi {
        /// Smallest x (at least 2).
        #[arg(long = "x-min", default_value_t = 2.0)]
        x_min: f64,
        #[arg(long = "x-max", default_value_t = 20.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Number of zero pairs in the explicit formula.
        #[arg(long = "K", default_value_t = 13)]
        k: usize,
        /// Zero ordinate file (default: the bundled first 200 zeros).
        #[arg(long)]
        zeros: Option<PathBuf>,
    },
}

/// Tabular output with ordered key/value metadata.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    fn new(columns: &[&str]) -> Self {
        Report {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if self.columns.is_empty() {
            return out;
        }
        if !self.meta.is_empty() {
            out.push('\n');
        }
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain(std::iter::once(self.columns[i].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(&self.columns));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    /// Metadata as `# key: value` lines, then the header and rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("write to memory");
        for r in &self.rows {
            w.write_record(r).expect("write to memory");
        }
        let body = w.into_inner().expect("flush to memory");
        out.push_str(&String::from_utf8(body).expect("utf-8 input"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix("# ") else {
                break;
            };
            let rest = rest.trim_end_matches('\n');
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| CliError::Report(format!("bad metadata line '{rest}'")))?;
            meta.push((k.to_string(), v.to_string()));
            body_start += line.len();
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let columns = reader
            .headers()
            .map_err(|e| CliError::Report(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| CliError::Report(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Report {
            meta,
            columns,
            rows,
        })
    }

    /// `{"columns": [...], "meta": [[key, value], ...], "rows": [[...], ...]}`.
    /// Integer and decimal cells become JSON numbers.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| cell_to_json(c)).collect()))
            .collect();
        let meta: Vec<Value> = self.meta.iter().map(|(k, v)| json!([k, v])).collect();
        let doc = json!({ "columns": self.columns, "meta": meta, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let bad = |m: &str| CliError::Report(m.to_string());
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Report(e.to_string()))?;
        let strings = |v: &Value| -> Result<Vec<String>, CliError> {
            v.as_array()
                .ok_or_else(|| bad("expected an array"))?
                .iter()
                .map(|c| match c {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(bad("cells must be strings or numbers")),
                })
                .collect()
        };
        let columns = strings(&doc["columns"])?;
        let meta = doc["meta"]
            .as_array()
            .ok_or_else(|| bad("missing meta"))?
            .iter()
            .map(|pair| {
                let kv = strings(pair)?;
                match <[String; 2]>::try_from(kv) {
                    Ok([k, v]) => Ok((k, v)),
                    Err(_) => Err(bad("meta entries are [key, value] pairs")),
                }
            })
            .collect::<Result<_, _>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| bad("missing rows"))?
            .iter()
            .map(strings)
            .collect::<Result<_, _>>()?;
        Ok(Report {
            meta,
            columns,
            rows,
        })
    }
}

fn cell_to_json(cell: &str) -> Value {
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    let looks_decimal = cell
        .bytes()
        .all(|b| b.is_ascii_digit() || b == b'.' || b == b'-')
        && cell.bytes().any(|b| b.is_ascii_digit());
    if looks_decimal {
        if let Some(n) = cell
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
        {
            return Value::Number(n);
        }
    }
    Value::String(cell.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn load_system(path: &Path, vars: Option<usize>) -> Result<PolySystem, CliError> {
    Ok(parse_system(&read_file(path)?, vars)?)
}

fn require_prime(p: u64) -> Result<(), CliError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FieldError::NotPrime(p).into())
    }
}

/// (p, n) with q = p^n.
fn prime_power(q: u64) -> Result<(u64, u32), CliError> {
    let factors = prime_factors(q);
    if q < 2 || factors.len() != 1 {
        return Err(CliError::Usage(format!("q = {q} is not a prime power")));
    }
    let p = factors[0];
    let mut n = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        n += 1;
    }
    Ok((p, n))
}

fn affine_counts(
    sys: &PolySystem,
    p: u64,
    degrees: impl Iterator<Item = u32>,
    opts: CountOptions,
) -> Result<Vec<(u32, u64, u64)>, CliError> {
    degrees
        .map(|n| {
            let field = make_field(p, n)?;
            Ok((n, field.q(), count_affine(sys, &field, opts)?))
        })
        .collect()
}

fn run_count(
    file: &Path,
    p: u64,
    n: Option<u32>,
    n_max: Option<u32>,
    vars: Option<usize>,
    projective: bool,
    counting: &CountingArgs,
) -> Result<Report, CliError> {
    require_prime(p)?;
    let sys = load_system(file, vars)?;
    let degrees: Vec<u32> = match (n, n_max) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (1..=m).collect(),
        (None, None) => return Err(CliError::Usage("count needs --n or --n-max".into())),
    };
    if degrees.contains(&0) {
        return Err(FieldError::ZeroDegree.into());
    }
    let opts = counting.options();
    let mut report = Report::new(&["n", "q", "count"]);
    report.meta("p", p);
    report.meta("variables", sys.num_vars());
    report.meta("mode", if projective { "projective" } else { "affine" });
    for &n in &degrees {
        let field = make_field(p, n)?;
        let count = if projective {
            count_projective_variety(&sys, &field, opts)?
        } else {
            count_affine(&sys, &field, opts)?
        };
        report.row(vec![
            n.to_string(),
            field.q().to_string(),
            count.to_string(),
        ]);
    }
    Ok(report)
}

fn run_predict(
    p: u64,
    n1: Option<u64>,
    file: Option<&Path>,
    n_max: u32,
    counting: &CountingArgs,
) -> Result<Report, CliError> {
    require_prime(p)?;
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let brute = match file {
        Some(path) => {
            let sys = load_system(path, None)?;
            Some(affine_counts(&sys, p, 1..=n_max, counting.options())?)
        }
        None => None,
    };
    let n1 = match (n1, &brute) {
        (Some(v), _) => v,
        (None, Some(b)) => b[0].2,
        (None, None) => return Err(CliError::Usage("predict needs --n1 or --file".into())),
    };
    let alpha = hasse_alpha(p, n1)?;
    let bound = 2.0 * (p as f64).sqrt();

    let mut columns = vec![
        "n",
        "predicted",
        "correction",
        "alpha_n",
        "alpha_n_plus_conj",
    ];
    if brute.is_some() {
        columns.extend(["brute_force", "match"]);
    }
    let mut report = Report::new(&columns);
    report.meta("p", p);
    report.meta("N1", n1);
    report.meta("trace", alpha.trace_a);
    report.meta("alpha", format_complex(alpha.value()));
    report.meta(
        "hasse",
        format!("|{}| <= {} holds", alpha.trace_a, format_real6(bound)),
    );
    let mut all_match = true;
    for n in 1..=n_max {
        let predicted = predict_affine_count(&alpha, n);
        let mut row = vec![
            n.to_string(),
            predicted.to_string(),
            correction_term(&alpha, n).to_string(),
            format_complex(round_complex(alpha.power(n))),
            alpha.power_sum(n).to_string(),
        ];
        if let Some(b) = &brute {
            let actual = b[n as usize - 1].2;
            let ok = actual as i128 == predicted;
            all_match &= ok;
            row.push(actual.to_string());
            row.push(if ok { "yes" } else { "no" }.to_string());
        }
        report.row(row);
    }
    if brute.is_some() {
        report.meta("all_match", if all_match { "yes" } else { "no" });
    }
    Ok(report)
}

/// Round to 9 decimals so that printed eigenvalues are stable.
fn round_complex(z: num_complex::Complex64) -> num_complex::Complex64 {
    let r = |x: f64| {
        let v = (x * 1e9).round() / 1e9;
        if v == 0.0 {
            0.0
        } else {
            v
        }
    };
    num_complex::Complex64::new(r(z.re), r(z.im))
}

fn format_real6(x: f64) -> String {
    format!("{x:.6}")
}

#[allow(clippy::too_many_arguments)]
fn run_zeta(
    p: u64,
    genus: u32,
    counts: Option<&[u64]>,
    file: Option<&Path>,
    points_at_infinity: u64,
    n_max: Option<u32>,
    counting: &CountingArgs,
) -> Result<Report, CliError> {
    require_prime(p)?;
    let seq = match (counts, file) {
        (Some(c), _) => CountSequence::new(p, c.to_vec(), true)?,
        (None, Some(path)) => {
            let sys = load_system(path, None)?;
            let m = n_max.unwrap_or(2 * genus + 4);
            let affine: Vec<u64> = affine_counts(&sys, p, 1..=m, counting.options())?
                .into_iter()
                .map(|(_, _, c)| c)
                .collect();
            CountSequence::new(p, affine, false)?.with_points_at_infinity(points_at_infinity)
        }
        (None, None) => return Err(CliError::Usage("zeta needs --counts or --file".into())),
    };
    let series = zeta_series(&seq)?;
    let z = rational_reconstruct(&series, 2 * genus as usize, &curve_denominator(p), p)?;

    let mut report = Report::new(&["part", "re", "im", "modulus", "weight"]);
    report.meta("zeta", &z);
    report.meta("counts", join(&seq.counts));
    let betti: Vec<String> = z
        .betti_numbers()
        .iter()
        .map(|(k, b)| format!("b{k}={b}"))
        .collect();
    report.meta("betti", betti.join(" "));
    for (part, roots) in [
        ("numerator", &z.numerator_roots),
        ("denominator", &z.denominator_roots),
    ] {
        for r in roots {
            let v = round_complex(r.value());
            report.row(vec![
                part.to_string(),
                fixed(v.re),
                fixed(v.im),
                fixed(r.value().norm()),
                r.weight.to_string(),
            ]);
        }
    }
    Ok(report)
}

fn fixed(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn run_motive(expr: &str, q: Option<u64>, n_max: u32) -> Result<Report, CliError> {
    let m = parse_motive(expr, q)?;
    let mut report = Report::new(&["n", "count"]);
    report.meta("motive", expr);
    report.meta("q", m.base());
    for (k, values) in m.pieces() {
        let list: Vec<String> = values
            .iter()
            .map(|&v| format_complex(round_complex(v)))
            .collect();
        report.meta(&format!("weight {k}"), format!("[{}]", list.join(", ")));
    }
    let betti: BTreeMap<u32, usize> = m.betti_numbers();
    let betti: Vec<String> = betti.iter().map(|(k, b)| format!("b{k}={b}")).collect();
    report.meta("betti", betti.join(" "));
    for n in 1..=n_max {
        report.row(vec![n.to_string(), m.point_count(n)?.to_string()]);
    }
    Ok(report)
}

fn run_pspace(dim: u32, q: u64) -> Result<Report, CliError> {
    let (p, n) = prime_power(q)?;
    let field = make_field(p, n)?;
    let count = count_projective_space(dim, &field);
    let mut report = Report::new(&["dim", "q", "count", "closed_form"]);
    report.row(vec![
        dim.to_string(),
        q.to_string(),
        count.to_string(),
        projective_space_closed_form(q, dim).to_string(),
    ]);
    Ok(report)
}

fn run_pi(
    x_min: f64,
    x_max: f64,
    step: f64,
    k: usize,
    zeros: Option<&Path>,
) -> Result<Report, CliError> {
    if !(x_min >= 2.0 && x_max >= x_min && step > 0.0 && x_max.is_finite()) {
        return Err(CliError::Usage(
            "need 2 <= x-min <= x-max and step > 0".into(),
        ));
    }
    let table = match zeros {
        Some(path) => load_zeros(path)?,
        None => ZeroTable::bundled(),
    };
    let pc = PrimeCounter::new(x_max.floor() as u64);
    let mut report = Report::new(&["x", "pi", "li", "approx"]);
    report.meta("K", k);
    let steps = ((x_max - x_min) / step + 1e-9).floor() as u64;
    for i in 0..=steps {
        let x = x_min + i as f64 * step;
        report.row(vec![
            format!("{x}"),
            sieve_pi(x, &pc)?.to_string(),
            format!("{:.9}", li(x)?),
            format!("{:.9}", riemann_approx(x, &table, k)?),
        ]);
    }
    Ok(report)
}

/// Execute a parsed command and return its report.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Count {
            file,
            p,
            n,
            n_max,
            vars,
            projective,
            counting,
        } => run_count(file, *p, *n, *n_max, *vars, *projective, counting),
        Command::Predict {
            p,
            n1,
            file,
            n_max,
            counting,
        } => run_predict(*p, *n1, file.as_deref(), *n_max, counting),
        Command::Zeta {
            p,
            genus,
            counts,
            file,
            points_at_infinity,
            n_max,
            counting,
        } => run_zeta(
            *p,
            *genus,
            counts.as_deref(),
            file.as_deref(),
            *points_at_infinity,
            *n_max,
            counting,
        ),
        Command::Motive { expr, q, n_max } => run_motive(expr, *q, *n_max),
        Command::Pspace { dim, q } => run_pspace(*dim, *q),
        Command::Pi {
            x_min,
            x_max,
            step,
            k,
            zeros,
        } => run_pi(*x_min, *x_max, *step, *k, zeros.as_deref()),
    }
}

/// Parse arguments (including the program name) and render the report.
/// Without `--format`, `default_format` is used.
pub fn run_to_string<I, T>(args: I, default_format: Format) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(first_line(&e.to_string())))?;
    let report = execute(&cli.command)?;
    Ok(report.render(cli.format.unwrap_or(default_format)))
}

fn first_line(msg: &str) -> String {
    let line = msg
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim();
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

fn single_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Entry point for the binary: exit 0 on success, 2 on usage errors, 1 on
/// any other failure, with a one-line diagnostic on stderr.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {}", first_line(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let default = if stdout.is_terminal() {
        Format::Table
    } else {
        Format::Csv
    };
    match execute(&cli.command) {
        Ok(report) => {
            let mut lock = stdout.lock();
            let text = report.render(cli.format.unwrap_or(default));
            if lock
                .write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", single_line(&e.to_string()));
            ExitCode::from(1)
        }
    }
}
