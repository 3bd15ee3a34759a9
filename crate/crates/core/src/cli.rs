//! Batch experiment runner behind the `blaschke-lab` binary.
//!
//! Every subcommand validates its whole configuration before computing anything,
//! writes its table atomically and reports a fitted exponent where one makes sense.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::extremal::{
    embed_sweep, exponent_fit, interp_sweep, kernel_norm_scan_with, test_function, ExponentFit,
    KernelTarget, Space, SweepGrid, SweepOptions,
};
use crate::funcexpr::{FunctionExpr, Polynomial};
use crate::modelspace::{mw_basis, reproducing_kernel, PointSequence};
use crate::norms::{hardy_norm, sup_norm};
use crate::quotient::{quotient_norm_seeded, DEFAULT_NORM_SEED};

/// Environment variable consulted for the seed when neither flags nor config set one.
pub const SEED_ENV: &str = "BLASCHKE_LAB_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const SUBCOMMANDS: [&str; 6] = ["interp", "embed", "kernel-norms", "quotient", "fit", "selftest"];

#[derive(Parser, Debug)]
#[command(name = "blaschke-lab", version, about = "Interpolation and embedding constants for finite Blaschke products")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// key=value file mirroring the long flags; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for power iteration and sampling, decimal or 0x-hex (falls back to $BLASCHKE_LAB_SEED)
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Worker threads for grid sweeps (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the table here (atomically) and print the fit summary to stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Interpolation lower bounds over a grid of one-point sequences.
    Interp {
        #[arg(long, value_enum, default_value_t = SpaceKind::Hardy)]
        space: SpaceKind,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Embedding lower bounds `H^inf <- A^p(beta)`.
    Embed {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Reproducing-kernel norms at the extremal configuration.
    KernelNorms {
        #[arg(long, value_enum)]
        target: TargetKind,
        /// Exponent of `H^q` or `A^q(gamma)`; `inf` is allowed for `hq`.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Derivative order (`bloch`, `higher-l`).
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Quotient norm of one function on one sequence.
    Quotient {
        #[arg(long)]
        sigma: PathBuf,
        /// Function literal: poly:c0,c1,.. | rational:NUM|DEN | qn:n,r,N | kernel:re,im
        #[arg(long)]
        f: String,
    },
    /// Log-log least squares on two columns of a CSV table.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "x")]
        x_col: String,
        #[arg(long, default_value = "lower")]
        y_col: String,
    },
    /// Quick consistency checks on small known cases.
    Selftest,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64, 128])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5f64, 0.75, 0.9])]
    r: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SpaceKind {
    Hardy,
    Bergman,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TargetKind {
    Hq,
    #[value(name = "daq")]
    DAq,
    #[value(name = "ddaq")]
    DdAq,
    Bloch,
    HigherL,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {text:?}: {e}"))
}

/// What to compute, with every parameter already validated.
#[derive(Clone, Debug)]
pub enum Task {
    Interp { space: Space, grid: SweepGrid },
    Embed { p: f64, beta: f64, grid: SweepGrid },
    KernelNorms { target: KernelTarget, grid: SweepGrid },
    Quotient { sigma: PointSequence, f: FunctionExpr },
    Fit { input: PathBuf, x_col: String, y_col: String },
    Selftest,
}

/// Parsed and validated configuration of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            rel_tol: self.tol,
            seed: self.seed,
        }
    }
}

/// Read a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::invalid(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err(Error::invalid("config files cannot include other config files"));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn has_flag(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    let with_eq = format!("--{key}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == long.as_str() || s.starts_with(&with_eq)
    })
}

/// Splice config-file entries in right after the subcommand, skipping keys the
/// command line already sets.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let entries = read_config_file(&path)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut extra = Vec::new();
    for (k, v) in entries {
        if !has_flag(&args, &k) {
            extra.push(OsString::from(format!("--{k}")));
            extra.push(OsString::from(v));
        }
    }
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

fn grid_from(args: &GridArgs) -> Result<SweepGrid> {
    SweepGrid::new(args.n.clone(), args.r.clone())
}

fn build_config(cli: Cli) -> Result<RunConfig> {
    let seed = match cli.global.seed {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => parse_seed(&v).map_err(Error::InvalidInput)?,
            Err(_) => DEFAULT_NORM_SEED,
        },
    };
    if let Some(t) = cli.global.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid(format!("--tol must lie in (0, 1), got {t}")));
        }
    }
    if cli.global.jobs == Some(0) {
        return Err(Error::invalid("--jobs must be at least 1"));
    }
    let task = match cli.command {
        CommandArgs::Interp { space, p, beta, grid } => {
            let space = match space {
                SpaceKind::Hardy => Space::Hardy { p },
                SpaceKind::Bergman => Space::Bergman { p, beta },
            };
            space.validate()?;
            Task::Interp {
                space,
                grid: grid_from(&grid)?,
            }
        }
        CommandArgs::Embed { p, beta, grid } => {
            Space::Bergman { p, beta }.validate()?;
            let grid = grid_from(&grid)?;
            let two_n = 2 * crate::extremal::choose_n(beta)? as usize;
            if let Some(&n) = grid.n_values.iter().find(|&&n| n <= two_n) {
                return Err(Error::NTooSmall { n, two_n });
            }
            Task::Embed { p, beta, grid }
        }
        CommandArgs::KernelNorms {
            target,
            q,
            gamma,
            l,
            alpha,
            grid,
        } => {
            let target = match target {
                TargetKind::Hq => KernelTarget::Hq { q },
                TargetKind::DAq => KernelTarget::DerivativeAq { l: 1, q, gamma },
                TargetKind::DdAq => KernelTarget::DerivativeAq { l: 2, q, gamma },
                TargetKind::HigherL => KernelTarget::DerivativeAq {
                    l: l.unwrap_or(1),
                    q,
                    gamma,
                },
                TargetKind::Bloch => KernelTarget::Bloch {
                    l: l.unwrap_or(0),
                    alpha,
                },
            };
            target.validate()?;
            Task::KernelNorms {
                target,
                grid: grid_from(&grid)?,
            }
        }
        CommandArgs::Quotient { sigma, f } => Task::Quotient {
            sigma: PointSequence::from_file(&sigma)?,
            f: parse_function_literal(&f)?,
        },
        CommandArgs::Fit { input, x_col, y_col } => Task::Fit { input, x_col, y_col },
        CommandArgs::Selftest => Task::Selftest,
    };
    Ok(RunConfig {
        task,
        seed,
        tol: cli.global.tol,
        jobs: cli.global.jobs,
        out: cli.global.out,
        format: cli.global.format,
    })
}

/// Parse and validate a command line (program name first).
pub fn parse_run_config<I, T>(argv: I) -> std::result::Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args = merge_config(args).map_err(ParseOutcome::Invalid)?;
    let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    build_config(cli).map_err(ParseOutcome::Invalid)
}

/// Why [`parse_run_config`] did not produce a configuration.
#[derive(Debug)]
pub enum ParseOutcome {
    /// Usage errors as well as `--help` and `--version`.
    Clap(clap::Error),
    Invalid(Error),
}

fn parse_number_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .map(|t| {
            Complex64::from_str(t.trim())
                .map_err(|_| Error::invalid(format!("cannot parse coefficient {t:?}")))
        })
        .collect()
}

/// Function literals:
/// `poly:c0,c1,..`, `rational:n0,n1,..|d0,d1,..`, `qn:n,r,N` and `kernel:re,im`
/// (the Cauchy kernel `1 / (1 - conj(zeta) z)`). Coefficients may be complex, e.g. `1+2i`.
pub fn parse_function_literal(text: &str) -> Result<FunctionExpr> {
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("function literal {text:?} lacks a kind prefix")))?;
    match kind.trim() {
        "poly" => Ok(FunctionExpr::polynomial(Polynomial::new(parse_number_list(body)?))),
        "rational" => {
            let (num, den) = body
                .split_once('|')
                .ok_or_else(|| Error::invalid("rational literal needs NUM|DEN"))?;
            FunctionExpr::rational(
                Polynomial::new(parse_number_list(num)?),
                Polynomial::new(parse_number_list(den)?),
            )
        }
        "qn" => {
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            let [n, r, big_n] = parts[..] else {
                return Err(Error::invalid("qn literal needs n,r,N"));
            };
            let n: usize = n.parse().map_err(|_| Error::invalid(format!("bad n {n:?}")))?;
            let r: f64 = r.parse().map_err(|_| Error::invalid(format!("bad r {r:?}")))?;
            let big_n: u32 = big_n
                .parse()
                .map_err(|_| Error::invalid(format!("bad N {big_n:?}")))?;
            Ok(test_function(n, r, big_n)?.expr)
        }
        "kernel" => {
            let parts: Vec<f64> = body
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::invalid(format!("bad number {t:?}"))))
                .collect::<Result<_>>()?;
            let [re, im] = parts[..] else {
                return Err(Error::invalid("kernel literal needs re,im"));
            };
            FunctionExpr::cauchy_kernel(Complex64::new(re, im))
        }
        other => Err(Error::invalid(format!("unknown function literal kind {other:?}"))),
    }
}

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `bytes` next to `path` and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json_rows: serde_json::Value,
}

impl Table {
    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

fn fit_summary(points: &[(f64, f64)], expected: f64) -> serde_json::Value {
    match exponent_fit(points) {
        Ok(ExponentFit {
            slope,
            intercept,
            max_residual,
        }) => json!({
            "slope": slope,
            "intercept": intercept,
            "max_residual": max_residual,
            "expected_slope": expected,
        }),
        Err(e) => json!({ "fit_error": e.to_string(), "expected_slope": expected }),
    }
}

fn emit(config: &RunConfig, table: Table, summary: serde_json::Value) -> Result<()> {
    let body = match config.format {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(&json!({ "rows": table.json_rows, "summary": summary }))
                .map_err(|e| Error::Io(e.to_string()))?;
            v.push(b'\n');
            v
        }
    };
    let summary_text = serde_json::to_string(&summary).map_err(|e| Error::Io(e.to_string()))?;
    match &config.out {
        Some(path) => {
            write_atomic(path, &body)?;
            println!("{summary_text}");
        }
        None => {
            std::io::stdout().write_all(&body)?;
            eprintln!("{summary_text}");
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn execute(config: &RunConfig) -> Result<()> {
    let opts = config.sweep_options();
    match &config.task {
        Task::Interp { space, grid } => {
            let rows = interp_sweep(grid, space, &opts)?;
            let table = Table {
                header: vec!["n", "r", "x", "lower", "fejer", "supnorm"],
                rows: rows
                    .iter()
                    .map(|v| {
                        vec![
                            v.n.to_string(),
                            format_real(v.r),
                            format_real(v.x),
                            format_real(v.lower),
                            format_real(v.fejer),
                            format_real(v.supnorm),
                        ]
                    })
                    .collect(),
                json_rows: to_json(&rows),
            };
            let pts: Vec<(f64, f64)> = rows.iter().map(|v| (v.x, v.lower)).collect();
            let mut summary = fit_summary(&pts, space.interpolation_exponent());
            summary["command"] = json!("interp");
            summary["space"] = to_json(space);
            summary["rows"] = json!(rows.len());
            emit(config, table, summary)
        }
        Task::Embed { p, beta, grid } => {
            let rows = embed_sweep(grid, *p, *beta, &opts)?;
            let table = Table {
                header: vec!["n", "r", "x", "m", "lower"],
                rows: rows
                    .iter()
                    .map(|v| {
                        vec![
                            v.n.to_string(),
                            format_real(v.r),
                            format_real(v.x),
                            v.m.to_string(),
                            format_real(v.value),
                        ]
                    })
                    .collect(),
                json_rows: to_json(&rows),
            };
            let pts: Vec<(f64, f64)> = rows.iter().map(|v| (v.x, v.value)).collect();
            let mut summary = fit_summary(&pts, (2.0 + beta) / p);
            summary["command"] = json!("embed");
            summary["p"] = json!(p);
            summary["beta"] = json!(beta);
            summary["rows"] = json!(rows.len());
            emit(config, table, summary)
        }
        Task::KernelNorms { target, grid } => {
            let rows = kernel_norm_scan_with(grid, target, &opts)?;
            let table = Table {
                header: vec!["n", "r", "x", "value"],
                rows: rows
                    .iter()
                    .map(|v| {
                        vec![
                            v.n.to_string(),
                            format_real(v.r),
                            format_real(v.x),
                            format_real(v.value),
                        ]
                    })
                    .collect(),
                json_rows: to_json(&rows),
            };
            let pts: Vec<(f64, f64)> = rows.iter().map(|v| (v.x, v.value)).collect();
            let mut summary = fit_summary(&pts, target.exponent());
            summary["command"] = json!("kernel-norms");
            summary["target"] = to_json(target);
            summary["rows"] = json!(rows.len());
            emit(config, table, summary)
        }
        Task::Quotient { sigma, f } => {
            let v = quotient_norm_seeded(f, sigma, config.seed)?;
            println!("{v}");
            if let Some(path) = &config.out {
                let body = match config.format {
                    OutputFormat::Csv => format!("quotient_norm\n{}\n", format_real(v)),
                    OutputFormat::Json => format!("{}\n", json!({ "quotient_norm": v })),
                };
                write_atomic(path, body.as_bytes())?;
            }
            Ok(())
        }
        Task::Fit { input, x_col, y_col } => {
            let points = read_columns(input, x_col, y_col)?;
            let fit = exponent_fit(&points)?;
            let text = serde_json::to_string(&fit).map_err(|e| Error::Io(e.to_string()))?;
            println!("{text}");
            if let Some(path) = &config.out {
                write_atomic(path, format!("{text}\n").as_bytes())?;
            }
            Ok(())
        }
        Task::Selftest => {
            let mut failed = 0;
            for (name, outcome) in selftest_checks() {
                match outcome {
                    Ok(true) => println!("PASS {name}"),
                    Ok(false) => {
                        failed += 1;
                        println!("FAIL {name}");
                    }
                    Err(e) => {
                        failed += 1;
                        println!("FAIL {name}: {e}");
                    }
                }
            }
            if failed > 0 {
                return Err(Error::InvariantViolation {
                    what: "selftest",
                    detail: format!("{failed} check(s) failed"),
                });
            }
            Ok(())
        }
    }
}

/// `(x, y)` pairs from two named columns of a CSV file with a header row.
pub fn read_columns(path: &Path, x_col: &str, y_col: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let headers = reader.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::invalid(format!("column {name:?} not found in {}", path.display())))
    };
    let (xi, yi) = (index(x_col)?, index(y_col)?);
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            let t = record.get(i).unwrap_or("").trim();
            t.parse()
                .map_err(|_| Error::invalid(format!("row {}: cannot parse {t:?}", line + 2)))
        };
        out.push((field(xi)?, field(yi)?));
    }
    Ok(out)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

fn selftest_checks() -> Vec<(&'static str, Result<bool>)> {
    let zero = Complex64::new(0.0, 0.0);
    vec![
        ("quotient norm of 1+z on (0,0) is the golden ratio", (|| {
            let sigma = PointSequence::one_point(2, zero)?;
            let v = quotient_norm_seeded(&FunctionExpr::poly(&[1.0, 1.0]), &sigma, DEFAULT_NORM_SEED)?;
            Ok(close(v, (1.0 + 5f64.sqrt()) / 2.0, 1e-9))
        })()),
        ("sup norm of Q_4 at r = 0.5 is 48", (|| {
            let tf = test_function(4, 0.5, 1)?;
            Ok(close(sup_norm(&tf.expr, tf.x())?.value, 48.0, 1e-6))
        })()),
        ("H^1 norm of Q_4 at r = 0.5 is 4", (|| {
            let tf = test_function(4, 0.5, 1)?;
            Ok(close(hardy_norm(&tf.expr, 1.0)?.value, 4.0, 1e-6))
        })()),
        ("Malmquist–Walsh Gram matrix is the identity", (|| {
            let pts = [0.3, -0.5, 0.7, 0.2, -0.85]
                .iter()
                .zip([0.1, 0.4, -0.2, 0.0, 0.3])
                .map(|(&a, b)| Complex64::new(a, b))
                .collect();
            let gram = mw_basis(&PointSequence::new(pts)?).gram(256);
            Ok(gram.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, v)| {
                    let want = if i == j { 1.0 } else { 0.0 };
                    (v - want).norm() < 1e-10
                })
            }))
        })()),
        ("kernel at 1 for sigma = (0.5) has H^2 norm sqrt 3", (|| {
            let sigma = PointSequence::one_point(1, Complex64::new(0.5, 0.0))?;
            let k = reproducing_kernel(&sigma, Complex64::new(1.0, 0.0))?;
            Ok(close(crate::norms::hardy_norm(&k.expr, 2.0)?.value, 3f64.sqrt(), 1e-9))
        })()),
    ]
}

/// Run the command line `argv` (program name first) and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let config = match parse_run_config(argv) {
        Ok(c) => c,
        Err(ParseOutcome::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(ParseOutcome::Invalid(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let result = match config.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| execute(&config)),
            Err(e) => Err(Error::invalid(format!("cannot start {jobs} workers: {e}"))),
        },
        None => execute(&config),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let f = parse_function_literal("poly:1,1").unwrap();
        assert_eq!(f.eval(Complex64::new(2.0, 0.0)).unwrap(), Complex64::new(3.0, 0.0));
        let f = parse_function_literal("poly:0,1+2i").unwrap();
        assert_eq!(f.eval(Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(1.0, 2.0));
        let f = parse_function_literal("rational:1|1,-0.5").unwrap();
        assert!((f.eval(Complex64::new(1.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        let f = parse_function_literal("kernel:0.5,0").unwrap();
        assert!((f.eval(Complex64::new(1.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        let f = parse_function_literal("qn:4,0.5,1").unwrap();
        assert!((f.eval(Complex64::new(-1.0, 0.0)).unwrap() - 48.0).norm() < 1e-10);
        for bad in ["", "poly", "poly:x", "rational:1", "qn:4,0.5", "kernel:1", "spline:1"] {
            assert!(parse_function_literal(bad).is_err(), "{bad}");
        }
        assert!(matches!(
            parse_function_literal("rational:1|1,-2"),
            Err(Error::PoleInsideDisk { .. })
        ));
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0x0b1a_5c4e").unwrap(), DEFAULT_NORM_SEED);
        assert!(parse_seed("-1").is_err());
    }

    #[test]
    fn real_format_has_17_digits() {
        assert_eq!(format_real(0.5), "5.0000000000000000e-1");
        assert_eq!(format_real(1280.0), "1.2800000000000000e3");
        let v = 0.1 + 0.2;
        assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn config_merging_prefers_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# sweep\np = 4\nn = 8,16\nr=0.5\nspace = hardy\n").unwrap();
        let cfg = cfg.to_string_lossy().to_string();
        let c = parse_run_config(["blaschke-lab", "interp", "--config", &cfg, "--p", "1"]).unwrap();
        match c.task {
            Task::Interp { space, grid } => {
                assert_eq!(space, Space::Hardy { p: 1.0 });
                assert_eq!(grid.n_values, vec![8, 16]);
                assert_eq!(grid.r_values, vec![0.5]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_fails_fast() {
        let bad = [
            vec!["x", "interp", "--p", "0.5"],
            vec!["x", "interp", "--r", "1.0"],
            vec!["x", "embed", "--n", "4,16", "--beta", "0"],
            vec!["x", "kernel-norms", "--target", "hq", "--q", "1"],
            vec!["x", "interp", "--tol", "0"],
        ];
        for argv in bad {
            assert!(matches!(parse_run_config(argv.clone()), Err(ParseOutcome::Invalid(_))), "{argv:?}");
        }
        assert!(matches!(parse_run_config(["x", "bogus"]), Err(ParseOutcome::Clap(_))));
    }
}
