//! Bernoulli-polynomial operational matrices and a spectral Galerkin solver for
//! initial-value ODEs on `[0, 1]`.
//!
//! The basis data (`M`, `Q`, the dual matrix, `ℐ`) is built once in exact rational
//! arithmetic and then converted to the working scalar. Every routine is generic over
//! [`Scalar`], so the same pipeline runs in `f64`, `f32`, or exactly over [`Rational`].
//!
//! ```
//! use bernoulli_opmat::{benchmarks, Benchmark};
//!
//! let report = benchmarks::run_benchmark("lane-emden", 6, 101).unwrap();
//! assert!(report.rms < 1e-12);
//! # let _ = Benchmark::names();
//! ```

pub mod basis;
pub mod benchmarks;
pub mod error;
pub mod galerkin;
pub mod matrix;
pub mod operational;
pub mod quadrature;
pub mod scalar;

pub use basis::{bernoulli_numbers, BasisContext, BernoulliTable, CoeffVector};
pub use benchmarks::{run_benchmark, Benchmark, SolveReport};
pub use error::{Error, Result};
pub use galerkin::{IvpProblem, NewtonConfig, SolveOptions, SpectralSolution};
pub use matrix::Matrix;
pub use operational::{OperationalSet, ProductRule};
pub use scalar::{Rational, Scalar};

/// Double-precision basis data, the default for solving.
pub type Basis64 = BasisContext<f64>;
/// Basis data kept entirely in exact rationals.
pub type ExactBasis = BasisContext<Rational>;

pub type Operators64 = OperationalSet<f64>;
pub type ExactOperators = OperationalSet<Rational>;

pub type Problem64 = IvpProblem<f64>;
pub type ExactProblem = IvpProblem<Rational>;

pub type Solution64 = SpectralSolution<f64>;
pub type ExactSolution = SpectralSolution<Rational>;
