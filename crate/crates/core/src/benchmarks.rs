//! The four reference problems with closed-form solutions, and error reporting.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::galerkin::{solve_mixed, solve_with, IvpProblem, SolveOptions, SpectralSolution};
use crate::operational::OperationalSet;
use crate::quadrature::{integrate_adaptive, DEFAULT_REL_TOL};
use crate::scalar::{rational_from_f64, rational_from_int, Rational, Scalar};

/// Points at which solution values are tabulated.
pub const TABLE_POINTS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

/// Default number of uniform points (endpoints included) for the RMS error.
pub const DEFAULT_RMS_POINTS: usize = 101;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 20;

/// A registered reference problem.
#[derive(Clone, Debug)]
pub struct Benchmark {
    name: &'static str,
    summary: &'static str,
    problem: IvpProblem<Rational>,
    exact: fn(f64) -> f64,
}

impl Benchmark {
    pub fn names() -> [&'static str; 4] {
        ["bessel0", "lane-emden", "riccati-tanh", "riccati-erf"]
    }

    pub fn all() -> Vec<Benchmark> {
        Self::names()
            .iter()
            .map(|n| Self::get(n).expect("registered"))
            .collect()
    }

    pub fn get(name: &str) -> Result<Benchmark> {
        let z = rational_from_int;
        let b = match name {
            "bessel0" => Benchmark {
                name: "bessel0",
                summary: "x u'' + u' + x u = 0, u(0) = 1, u'(0) = 0",
                problem: IvpProblem::new(
                    2,
                    vec![vec![z(0), z(1)], vec![z(1)], vec![z(0), z(1)]],
                    vec![z(0)],
                    vec![z(1), z(0)],
                )?,
                exact: bessel_j0,
            },
            "lane-emden" => Benchmark {
                name: "lane-emden",
                summary: "x u'' + 8 u' + x² u = x⁶ - x⁵ + 44x³ - 30x², u(0) = u'(0) = 0",
                problem: IvpProblem::new(
                    2,
                    vec![vec![z(0), z(0), z(1)], vec![z(8)], vec![z(0), z(1)]],
                    vec![z(0), z(0), z(-30), z(44), z(0), z(-1), z(1)],
                    vec![z(0), z(0)],
                )?,
                exact: |x| x.powi(4) - x.powi(3),
            },
            "riccati-tanh" => Benchmark {
                name: "riccati-tanh",
                summary: "u' = 2u - u² + 1, u(0) = 0",
                problem: IvpProblem::new(1, vec![vec![z(-2)], vec![z(1)]], vec![z(1)], vec![z(0)])?
                    .with_quadratic(vec![z(1)]),
                exact: riccati_tanh_exact,
            },
            "riccati-erf" => Benchmark {
                name: "riccati-erf",
                summary: "u' = 1 + x² - u², u(0) = 1",
                problem: IvpProblem::new(
                    1,
                    vec![vec![z(0)], vec![z(1)]],
                    vec![z(1), z(0), z(1)],
                    vec![z(1)],
                )?
                .with_quadratic(vec![z(1)]),
                exact: riccati_erf_exact,
            },
            other => {
                return Err(Error::Argument(format!(
                    "unknown benchmark '{other}' (known: {})",
                    Self::names().join(", ")
                )))
            }
        };
        Ok(b)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn summary(&self) -> &'static str {
        self.summary
    }

    pub fn problem(&self) -> &IvpProblem<Rational> {
        &self.problem
    }

    pub fn exact(&self, x: f64) -> f64 {
        (self.exact)(x)
    }
}

/// `J₀(x) = Σ (-1)^i x^{2i} / (4^i (i!)²)`, summed until a term drops below `1e-18`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    let mut i = 1.0;
    while term.abs() >= 1e-18 {
        term *= q / (i * i);
        sum += term;
        i += 1.0;
        if i > 500.0 {
            break;
        }
    }
    sum
}

pub fn riccati_tanh_exact(x: f64) -> f64 {
    let shift = 0.5 * ((SQRT_2 - 1.0) / (SQRT_2 + 1.0)).ln();
    1.0 + SQRT_2 * (SQRT_2 * x + shift).tanh()
}

/// `x + e^{-x²} / (1 + ∫₀ˣ e^{-t²} dt)`, the integral by adaptive Gauss–Legendre.
pub fn riccati_erf_exact(x: f64) -> f64 {
    let integral = integrate_adaptive(|t| (-t * t).exp(), 0.0, x, DEFAULT_REL_TOL).unwrap_or(f64::NAN);
    x + (-x * x).exp() / (1.0 + integral)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointValue {
    pub x: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
}

/// Outcome of one benchmark run.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub name: String,
    pub n: usize,
    /// Values at [`TABLE_POINTS`].
    pub point_values: Vec<PointValue>,
    /// Values on the uniform RMS grid.
    pub grid_values: Vec<PointValue>,
    pub rms: f64,
    pub newton_iters: Option<usize>,
    pub residual_norm: f64,
    /// Solved coefficients of the highest derivative.
    pub coefficients: Vec<f64>,
    /// Whether the solve ran in exact rational arithmetic.
    pub exact_mode: bool,
}

/// `sqrt(Σ (y - y_N)² / M)`.
pub fn rms(values: &[PointValue]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|p| p.abs_error * p.abs_error).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| k as f64 / (points - 1) as f64).collect(),
    }
}

fn check_args(n: usize, rms_points: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
        return Err(Error::Argument(format!(
            "N = {n} is outside the supported range {MIN_ORDER}..={MAX_ORDER}"
        )));
    }
    if rms_points < 2 {
        return Err(Error::Argument("the RMS grid needs at least 2 points".into()));
    }
    Ok(())
}

pub fn run_benchmark(name: &str, n: usize, rms_points: usize) -> Result<SolveReport> {
    run_benchmark_with(&Benchmark::get(name)?, n, rms_points, &SolveOptions::default())
}

pub fn run_benchmark_with(
    bench: &Benchmark,
    n: usize,
    rms_points: usize,
    options: &SolveOptions,
) -> Result<SolveReport> {
    run_problem(bench.name, &bench.problem, bench.exact, n, rms_points, options)
}

/// Same as [`run_benchmark`] but solved over [`Rational`]; linear problems only.
pub fn run_benchmark_exact(name: &str, n: usize, rms_points: usize) -> Result<SolveReport> {
    let bench = Benchmark::get(name)?;
    run_problem_exact(bench.name, &bench.problem, bench.exact, n, rms_points)
}

/// Solves `problem` at order `n` and compares it with `exact`.
///
/// An `exact` returning NaN yields NaN errors and RMS.
pub fn run_problem(
    name: &str,
    problem: &IvpProblem<Rational>,
    exact: impl Fn(f64) -> f64,
    n: usize,
    rms_points: usize,
    options: &SolveOptions,
) -> Result<SolveReport> {
    check_args(n, rms_points)?;
    let ops = OperationalSet::<f64>::new(n)?;
    let sol = solve_mixed(problem, &ops, options)?;
    report_from(name, &sol, exact, rms_points, false, Ok)
}

/// Same as [`run_problem`] but solved over [`Rational`]; linear problems only.
pub fn run_problem_exact(
    name: &str,
    problem: &IvpProblem<Rational>,
    exact: impl Fn(f64) -> f64,
    n: usize,
    rms_points: usize,
) -> Result<SolveReport> {
    check_args(n, rms_points)?;
    if !problem.is_linear() {
        return Err(Error::Argument(format!(
            "exact mode supports linear problems only; '{name}' has a quadratic term"
        )));
    }
    let ops = OperationalSet::<Rational>::new(n)?;
    let sol = solve_with(problem, &ops, &SolveOptions::default())?;
    report_from(name, &sol, exact, rms_points, true, rational_from_f64)
}

fn report_from<T: Scalar>(
    name: &str,
    sol: &SpectralSolution<T>,
    exact: impl Fn(f64) -> f64,
    rms_points: usize,
    exact_mode: bool,
    to_scalar: impl Fn(f64) -> Result<T>,
) -> Result<SolveReport> {
    let sample = |x: f64| -> Result<PointValue> {
        let approx = sol.evaluate(&to_scalar(x)?, 0)?.as_f64();
        let exact = exact(x);
        Ok(PointValue {
            x,
            approx,
            exact,
            abs_error: (approx - exact).abs(),
        })
    };
    let point_values = TABLE_POINTS.iter().map(|&x| sample(x)).collect::<Result<Vec<_>>>()?;
    let grid_values = uniform_grid(rms_points)
        .into_iter()
        .map(sample)
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport {
        name: name.to_string(),
        n: sol.truncation_order(),
        rms: rms(&grid_values),
        point_values,
        grid_values,
        newton_iters: sol.newton_iterations(),
        residual_norm: sol.residual_norm(),
        coefficients: sol.a_vector().as_slice().iter().map(Scalar::as_f64).collect(),
        exact_mode,
    })
}
