//! `bernoulli-opmat`: run the reference problems or TOML problem files.

mod problem_file;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bernoulli_opmat::benchmarks::{run_problem, run_problem_exact, DEFAULT_RMS_POINTS};
use bernoulli_opmat::{Benchmark, Error, ExactProblem, SolveOptions, SolveReport};
use clap::{Parser, Subcommand};
use thiserror::Error as ThisError;

use crate::problem_file::ProblemFile;

const PRECISION_VAR: &str = "BERNOULLI_OPMAT_PRECISION";
const DEFAULT_DECIMALS: usize = 10;
const DEFAULT_N: usize = 10;

#[derive(Parser)]
#[command(name = "bernoulli-opmat", version, about = "Bernoulli operational-matrix spectral solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a benchmark or problem file and tabulate it against the exact solution
    Run {
        /// Benchmark name (see `list`) or path to a TOML problem file
        target: String,
        /// Truncation order N
        #[arg(long = "n")]
        n: Option<usize>,
        /// Uniform grid size for the RMS error
        #[arg(long)]
        rms_points: Option<usize>,
        /// Write `x,approx,exact,abs_error` on the RMS grid to this file
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Solve in exact rational arithmetic (linear problems only)
        #[arg(long)]
        exact_mode: bool,
    },
    /// Emit `N,i,abs_coeff` rows of the solved coefficients for several orders
    Coeffs {
        /// Benchmark name or path to a TOML problem file
        target: String,
        /// Comma-separated truncation orders
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Write the CSV to this file instead of standard output
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// List the built-in benchmarks
    List,
}

#[derive(Debug, ThisError)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(msg) => CliError::Input(msg),
            Error::NoConvergence { iterations, residual } => CliError::Solver(format!(
                "solver failed after {iterations} iterations; residual norm {residual:.3e}"
            )),
            other => CliError::Solver(format!("solver failed: {other}")),
        }
    }
}

fn output_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("cannot write {}: {e}", path.display()))
}

/// A problem to solve, with its exact solution when known.
struct Case {
    name: String,
    summary: String,
    problem: ExactProblem,
    exact: Box<dyn Fn(f64) -> f64>,
    has_exact: bool,
    n: Option<usize>,
    rms_points: Option<usize>,
}

fn load(target: &str) -> Result<Case, CliError> {
    if let Ok(bench) = Benchmark::get(target) {
        return Ok(Case {
            name: bench.name().to_string(),
            summary: bench.summary().to_string(),
            problem: bench.problem().clone(),
            exact: Box::new(move |x| bench.exact(x)),
            has_exact: true,
            n: None,
            rms_points: None,
        });
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(CliError::Input(format!(
            "'{target}' is neither a benchmark ({}) nor a readable file",
            Benchmark::names().join(", ")
        )));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{target}: {e}")))?;
    let file: ProblemFile = problem_file::parse(&text, target).map_err(CliError::Input)?;
    let has_exact = file.exact_poly.is_some();
    Ok(Case {
        name: file.name.clone(),
        summary: format!("problem file {target}"),
        problem: file.problem.clone(),
        n: file.n,
        rms_points: file.rms_points,
        exact: Box::new(move |x| file.exact(x)),
        has_exact,
    })
}

fn table_decimals() -> Result<usize, CliError> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(DEFAULT_DECIMALS),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(d) if d <= 17 => Ok(d),
            _ => Err(CliError::Input(format!("{PRECISION_VAR} must be an integer in 0..=17, got '{v}'"))),
        },
    }
}

fn solve_case(case: &Case, n: usize, rms_points: usize, exact_mode: bool) -> Result<SolveReport, CliError> {
    let report = if exact_mode {
        run_problem_exact(&case.name, &case.problem, &case.exact, n, rms_points)?
    } else {
        run_problem(&case.name, &case.problem, &case.exact, n, rms_points, &SolveOptions::default())?
    };
    Ok(report)
}

fn print_report(out: &mut impl Write, case: &Case, report: &SolveReport, decimals: usize) -> io::Result<()> {
    let width = decimals + 5;
    writeln!(out, "{}: {}", case.name, case.summary)?;
    let arithmetic = if report.exact_mode { "exact rational" } else { "f64" };
    writeln!(out, "N = {}, {arithmetic} arithmetic", report.n)?;
    writeln!(out, "{:>4}  {:>width$}  {:>width$}  {:>10}", "x", "approx", "exact", "abs error")?;
    for p in &report.point_values {
        if case.has_exact {
            writeln!(
                out,
                "{:>4.1}  {:>width$.decimals$}  {:>width$.decimals$}  {:>10.3e}",
                p.x, p.approx, p.exact, p.abs_error
            )?;
        } else {
            writeln!(out, "{:>4.1}  {:>width$.decimals$}  {:>width$}  {:>10}", p.x, p.approx, "-", "-")?;
        }
    }
    if case.has_exact {
        writeln!(out, "RMS error ({} points): {:.4e}", report.grid_values.len(), report.rms)?;
    } else {
        writeln!(out, "RMS error: not available (no exact solution given)")?;
    }
    if let (Some(it), false) = (report.newton_iters, case.problem.is_linear()) {
        writeln!(out, "Newton iterations: {it}")?;
    }
    if report.exact_mode && report.residual_norm == 0.0 {
        writeln!(out, "residual: exactly zero (rational arithmetic)")
    } else {
        writeln!(out, "residual norm: {:.3e}", report.residual_norm)
    }
}

fn csv_field(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.14e}")
    }
}

/// Writes rows through a temporary file in the target directory, then renames it,
/// so a failure never leaves a partial file behind.
fn write_csv_atomically(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| output_error(path, e))?;
    let mut w = csv::Writer::from_writer(tmp);
    write_rows(&mut w, header, rows).map_err(|e| output_error(path, e))?;
    let tmp = w.into_inner().map_err(|e| output_error(path, e.error()))?;
    tmp.as_file().sync_all().map_err(|e| output_error(path, e))?;
    tmp.persist(path).map_err(|e| output_error(path, e.error))?;
    Ok(())
}

fn write_rows<W: Write>(w: &mut csv::Writer<W>, header: &[&str], rows: &[Vec<String>]) -> csv::Result<()> {
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_run(
    target: &str,
    n: Option<usize>,
    rms_points: Option<usize>,
    out_csv: Option<&Path>,
    exact_mode: bool,
) -> Result<(), CliError> {
    let decimals = table_decimals()?;
    let case = load(target)?;
    let n = n.or(case.n).unwrap_or(DEFAULT_N);
    let rms_points = rms_points.or(case.rms_points).unwrap_or(DEFAULT_RMS_POINTS);
    let report = solve_case(&case, n, rms_points, exact_mode)?;
    if let Some(path) = out_csv {
        let rows: Vec<Vec<String>> = report
            .grid_values
            .iter()
            .map(|p| vec![csv_field(p.x), csv_field(p.approx), csv_field(p.exact), csv_field(p.abs_error)])
            .collect();
        write_csv_atomically(path, &["x", "approx", "exact", "abs_error"], &rows)?;
    }
    print_report(&mut io::stdout().lock(), &case, &report, decimals).map_err(|e| CliError::Output(e.to_string()))
}

fn cmd_coeffs(target: &str, n_list: &[usize], out_csv: Option<&Path>) -> Result<(), CliError> {
    let case = load(target)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let report = solve_case(&case, n, 2, false)?;
        for (i, a) in report.coefficients.iter().enumerate() {
            rows.push(vec![n.to_string(), i.to_string(), csv_field(a.abs())]);
        }
    }
    let header = ["N", "i", "abs_coeff"];
    match out_csv {
        Some(path) => write_csv_atomically(path, &header, &rows),
        None => write_rows(&mut csv::Writer::from_writer(io::stdout().lock()), &header, &rows)
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

fn cmd_list() -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    for bench in Benchmark::all() {
        writeln!(out, "{:<14} {}", bench.name(), bench.summary()).map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            target,
            n,
            rms_points,
            out_csv,
            exact_mode,
        } => cmd_run(target, *n, *rms_points, out_csv.as_deref(), *exact_mode),
        Command::Coeffs { target, n_list, out_csv } => cmd_coeffs(target, n_list, out_csv.as_deref()),
        Command::List => cmd_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
