//! Galerkin reduction of polynomial-coefficient IVPs on `[0, 1]`.
//!
//! The highest derivative is the unknown expansion `u^{(m)} = AᵀB`. Lower derivatives
//! come from powers of the integration matrix plus the initial-condition polynomial:
//!
//! ```text
//! u^{(k)}(x) = Aᵀ ℐ^{m-k} B(x) + v_kᵀ B(x),   v_k ↔ Σ_{j=k}^{m-1} c_j x^{j-k} / (j-k)!
//! ```
//!
//! Every multiplication by a known polynomial `p = PᵀB` is realised with the product
//! matrix of the unknown-dependent vector `w`, contributing `C̃(w)ᵀ P`. The product
//! matrix follows [`SolveOptions::product`]; the default projects the full product back
//! onto the basis, which is the Galerkin product of two expansions. Since the basis is
//! complete in the truncated space and the dual matrix is invertible, the Galerkin
//! system `R(A) D = 0` is equivalent to `R(A) = 0`, which is what gets solved.

use num_traits::Zero;

use crate::basis::{eval_rows, poly_degree, CoeffVector};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm_2, norm_inf, Matrix};
use crate::operational::{OperationalSet, ProductRule};
use crate::scalar::{rational_from_f64, Rational, Scalar};

/// `Σ_k p_k(x) u^{(k)}(x) + q(x) u(x)² = r(x)` with `u^{(j)}(0) = c_j`, `j < m`.
///
/// Polynomials are ascending monomial coefficient lists.
#[derive(Clone, Debug, PartialEq)]
pub struct IvpProblem<T> {
    order: usize,
    coeff_polys: Vec<Vec<T>>,
    quad_poly: Option<Vec<T>>,
    rhs_poly: Vec<T>,
    init_conditions: Vec<T>,
}

impl<T: Scalar> IvpProblem<T> {
    pub fn new(
        order: usize,
        coeff_polys: Vec<Vec<T>>,
        rhs_poly: Vec<T>,
        init_conditions: Vec<T>,
    ) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::Argument(format!("order must be 1 or 2, got {order}")));
        }
        if coeff_polys.len() != order + 1 {
            return Err(Error::Argument(format!(
                "expected {} coefficient polynomials (one per derivative level), got {}",
                order + 1,
                coeff_polys.len()
            )));
        }
        if init_conditions.len() != order {
            return Err(Error::Argument(format!(
                "expected {order} initial conditions, got {}",
                init_conditions.len()
            )));
        }
        Ok(Self {
            order,
            coeff_polys,
            quad_poly: None,
            rhs_poly,
            init_conditions,
        })
    }

    /// Adds the `q(x) u²` term.
    pub fn with_quadratic(mut self, quad_poly: Vec<T>) -> Self {
        self.quad_poly = Some(quad_poly);
        self
    }

    pub fn without_quadratic(&self) -> Self {
        Self {
            quad_poly: None,
            ..self.clone()
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff_polys(&self) -> &[Vec<T>] {
        &self.coeff_polys
    }

    pub fn quad_poly(&self) -> Option<&[T]> {
        self.quad_poly.as_deref()
    }

    pub fn rhs_poly(&self) -> &[T] {
        &self.rhs_poly
    }

    pub fn init_conditions(&self) -> &[T] {
        &self.init_conditions
    }

    pub fn is_linear(&self) -> bool {
        self.quad_poly
            .as_ref()
            .is_none_or(|q| q.iter().all(|c| c.is_zero()))
    }

    /// Highest polynomial degree appearing anywhere in the equation.
    pub fn max_degree(&self) -> usize {
        self.coeff_polys
            .iter()
            .chain(self.quad_poly.iter())
            .chain(std::iter::once(&self.rhs_poly))
            .map(|p| poly_degree(p))
            .max()
            .unwrap_or(0)
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<IvpProblem<U>> {
        let conv = |p: &Vec<T>| p.iter().map(&f).collect::<Result<Vec<U>>>();
        Ok(IvpProblem {
            order: self.order,
            coeff_polys: self.coeff_polys.iter().map(conv).collect::<Result<_>>()?,
            quad_poly: self.quad_poly.as_ref().map(conv).transpose()?,
            rhs_poly: conv(&self.rhs_poly)?,
            init_conditions: conv(&self.init_conditions)?,
        })
    }

    /// Value of the left side minus the right side for a candidate `u` given by its
    /// derivatives `[u, u', ...]` at `x`.
    pub fn defect(&self, x: &T, derivs: &[T]) -> T {
        let p = |c: &[T]| c.iter().rev().fold(T::zero(), |acc, v| acc * x.clone() + v.clone());
        let mut lhs = T::zero();
        for (k, poly) in self.coeff_polys.iter().enumerate() {
            lhs = lhs + p(poly) * derivs[k].clone();
        }
        if let Some(q) = &self.quad_poly {
            lhs = lhs + p(q) * derivs[0].clone() * derivs[0].clone();
        }
        lhs - p(&self.rhs_poly)
    }
}

impl IvpProblem<Rational> {
    pub fn to_f64(&self) -> IvpProblem<f64> {
        self.convert(|r| Ok(f64::from_rational(r)))
            .expect("rational to f64 conversion is infallible")
    }
}

/// Damped Newton settings (Armijo backtracking on `‖R‖₂`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Stop once `‖R(A)‖_∞` is at or below this.
    pub tolerance: f64,
    pub backtrack: f64,
    pub min_step: f64,
    pub armijo: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-12,
            backtrack: 0.5,
            min_step: 1e-4,
            armijo: 1e-4,
        }
    }
}

/// Which algebraic system is driven to zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GalerkinSystem {
    /// `R(A) = 0`.
    #[default]
    Coefficients,
    /// `D R(A) = 0`, the tested form with the dual matrix applied.
    Projected,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub system: GalerkinSystem,
    pub product: ProductRule,
    pub newton: NewtonConfig,
}

/// Solved coefficients plus everything needed to evaluate `u^{(j)}`.
#[derive(Clone, Debug)]
pub struct SpectralSolution<T: Scalar> {
    a_vector: CoeffVector<T>,
    order: usize,
    init_vectors: Vec<CoeffVector<T>>,
    level_coeffs: Vec<CoeffVector<T>>,
    m_matrix: Matrix<T>,
    newton_iterations: Option<usize>,
    residual_norm: f64,
}

impl<T: Scalar> SpectralSolution<T> {
    /// Coefficients of the highest derivative, `u^{(m)} = AᵀB`.
    pub fn a_vector(&self) -> &CoeffVector<T> {
        &self.a_vector
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn truncation_order(&self) -> usize {
        self.a_vector.order()
    }

    /// `v_k` for `k < m`.
    pub fn init_vectors(&self) -> &[CoeffVector<T>] {
        &self.init_vectors
    }

    /// Bernoulli coefficients of `u^{(level)}`.
    pub fn coefficients(&self, level: usize) -> Result<&CoeffVector<T>> {
        self.level_coeffs.get(level).ok_or_else(|| {
            Error::Argument(format!(
                "derivative level {level} exceeds equation order {}",
                self.order
            ))
        })
    }

    pub fn newton_iterations(&self) -> Option<usize> {
        self.newton_iterations
    }

    /// `‖R(A)‖_∞` at the returned coefficients.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// `u^{(level)}(x)`.
    pub fn evaluate(&self, x: &T, level: usize) -> Result<T> {
        let c = self.coefficients(level)?;
        Ok(dot(c.as_slice(), &eval_rows(&self.m_matrix, x)))
    }
}

/// Everything about a problem that does not depend on `A`.
struct Assembly<'a, T: Scalar> {
    ops: &'a OperationalSet<T>,
    rule: ProductRule,
    order: usize,
    /// `(ℐᵀ)^{m-k}`, so that `w_k = lift[k] A + init[k]`.
    lift: Vec<Matrix<T>>,
    init: Vec<Vec<T>>,
    coeffs: Vec<Vec<T>>,
    quad: Option<Vec<T>>,
    rhs: Vec<T>,
}

impl<'a, T: Scalar> Assembly<'a, T> {
    fn new(problem: &IvpProblem<T>, ops: &'a OperationalSet<T>, rule: ProductRule) -> Result<Self> {
        let basis = ops.basis();
        let n = basis.order();
        let m = problem.order();
        if n < m {
            return Err(Error::Argument(format!(
                "truncation order {n} is below the equation order {m}"
            )));
        }
        let deg = problem.max_degree();
        if deg > n {
            return Err(Error::Argument(format!(
                "problem polynomial of degree {deg} exceeds truncation order {n}"
            )));
        }
        let integ_t = ops.integration().transpose();
        let lift = (0..=m)
            .map(|k| integ_t.pow((m - k) as u32))
            .collect::<Result<Vec<_>>>()?;

        let c = problem.init_conditions();
        let mut init = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut mono = vec![T::zero(); n + 1];
            let mut fact = T::one();
            for j in k..m {
                if j > k {
                    fact = fact * T::from_usize_exact(j - k);
                }
                mono[j - k] = c[j].clone() / fact.clone();
            }
            init.push(basis.expand_polynomial(&mono)?.into_vec());
        }

        let expand = |p: &[T]| basis.expand_polynomial(p).map(CoeffVector::into_vec);
        Ok(Self {
            ops,
            rule,
            order: m,
            lift,
            init,
            coeffs: problem
                .coeff_polys()
                .iter()
                .map(|p| expand(p))
                .collect::<Result<_>>()?,
            quad: problem.quad_poly().map(expand).transpose()?,
            rhs: expand(problem.rhs_poly())?,
        })
    }

    fn product(&self, c: &[T]) -> Result<Matrix<T>> {
        self.ops.product_with(self.rule, c)
    }

    fn level(&self, k: usize, a: &[T]) -> Result<Vec<T>> {
        let lifted = self.lift[k].mul_vec(a)?;
        Ok(lifted
            .into_iter()
            .zip(&self.init[k])
            .map(|(x, y)| x + y.clone())
            .collect())
    }

    /// `R(A)`, assembled term by term with product matrices of the unknown-dependent vectors.
    fn residual(&self, a: &[T]) -> Result<Vec<T>> {
        let mut r: Vec<T> = self.rhs.iter().map(|v| -v.clone()).collect();
        for k in 0..=self.order {
            let w = self.level(k, a)?;
            let term = self.product(&w)?.tr_mul_vec(&self.coeffs[k])?;
            add_assign(&mut r, &term);
        }
        if let Some(q) = &self.quad {
            let u = self.level(0, a)?;
            // (z + e)² = z·z + e·e + e·z + z·e, all carried by C̃(u)ᵀu
            let u_sq = self.product(&u)?.tr_mul_vec(&u)?;
            let term = self.product(&u_sq)?.tr_mul_vec(q)?;
            add_assign(&mut r, &term);
        }
        Ok(r)
    }

    /// `L` and `r₀` with `R(A) = L A + r₀` for the linear part of the equation.
    fn linear_part(&self) -> Result<(Matrix<T>, Vec<T>)> {
        let dim = self.ops.basis().dim();
        let mut l = Matrix::zeros(dim, dim);
        let mut r0: Vec<T> = self.rhs.iter().map(|v| -v.clone()).collect();
        for k in 0..=self.order {
            let pt = self.product(&self.coeffs[k])?.transpose();
            l = l.add(&pt.mul(&self.lift[k])?)?;
            add_assign(&mut r0, &pt.mul_vec(&self.init[k])?);
        }
        Ok((l, r0))
    }

    /// `∂R/∂A`. The bilinear term `C̃(u)ᵀu` linearises to `C̃(u)ᵀδu + C̃(δu)ᵀu`; both
    /// one-sided pieces equal `C̃(u)ᵀδu` because both product rules are symmetric.
    fn jacobian(&self, linear: &Matrix<T>, a: &[T]) -> Result<Matrix<T>> {
        let Some(q) = &self.quad else {
            return Ok(linear.clone());
        };
        let u = self.level(0, a)?;
        let one_sided = self.product(&u)?.transpose().mul(&self.lift[0])?;
        let d_sq = one_sided.add(&one_sided)?;
        let qt = self.product(q)?.transpose();
        linear.add(&qt.mul(&d_sq)?)
    }
}

fn add_assign<T: Scalar>(acc: &mut [T], v: &[T]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.clone() + b.clone();
    }
}

/// Coefficient vector of the Galerkin residual for a given `A`.
pub fn assemble_residual<T: Scalar>(
    problem: &IvpProblem<T>,
    ops: &OperationalSet<T>,
    a: &CoeffVector<T>,
) -> Result<CoeffVector<T>> {
    assemble_residual_with(problem, ops, a, ProductRule::default())
}

pub fn assemble_residual_with<T: Scalar>(
    problem: &IvpProblem<T>,
    ops: &OperationalSet<T>,
    a: &CoeffVector<T>,
    rule: ProductRule,
) -> Result<CoeffVector<T>> {
    ops.basis().check_len(a.len())?;
    let asm = Assembly::new(problem, ops, rule)?;
    asm.residual(a.as_slice()).map(CoeffVector::new)
}

pub fn solve<T: Scalar>(problem: &IvpProblem<T>, ops: &OperationalSet<T>) -> Result<SpectralSolution<T>> {
    solve_with(problem, ops, &SolveOptions::default())
}

pub fn solve_with<T: Scalar>(
    problem: &IvpProblem<T>,
    ops: &OperationalSet<T>,
    options: &SolveOptions,
) -> Result<SpectralSolution<T>> {
    let asm = Assembly::new(problem, ops, options.product)?;
    let (linear, r0) = asm.linear_part()?;
    let dual = ops.basis().dual_matrix();
    let project = |v: Vec<T>| -> Result<Vec<T>> {
        match options.system {
            GalerkinSystem::Coefficients => Ok(v),
            GalerkinSystem::Projected => dual.mul_vec(&v),
        }
    };
    let project_mat = |m: Matrix<T>| -> Result<Matrix<T>> {
        match options.system {
            GalerkinSystem::Coefficients => Ok(m),
            GalerkinSystem::Projected => dual.mul(&m),
        }
    };

    // Linear solve: of the full problem, or of the warm-start problem without u².
    let lin_sys = project_mat(linear.clone())?;
    let lin_lu = lin_sys.lu()?;
    let neg_r0: Vec<T> = project(r0)?.into_iter().map(|v| -v).collect();
    let mut a = lin_lu.solve(&neg_r0)?;

    let mut iterations = None;
    if asm.quad.is_none() {
        // a couple of refinement sweeps against the term-by-term residual
        for _ in 0..3 {
            let r = asm.residual(&a)?;
            if norm_inf(&r) <= options.newton.tolerance || r.iter().all(|v| v.is_zero()) {
                break;
            }
            let delta = lin_lu.solve(&negate(project(r)?))?;
            add_assign(&mut a, &delta);
        }
    } else {
        a = newton(&asm, &linear, a, options, &project, &project_mat, &mut iterations)?;
    }

    finish(&asm, ops, a, iterations, options)
}

/// Residual certificate and per-level coefficients for the final `A`.
fn finish<T: Scalar>(
    asm: &Assembly<'_, T>,
    ops: &OperationalSet<T>,
    a: Vec<T>,
    iterations: Option<usize>,
    options: &SolveOptions,
) -> Result<SpectralSolution<T>> {
    let residual = asm.residual(&a)?;
    let residual_norm = norm_inf(&residual);
    if residual_norm > options.newton.tolerance {
        return Err(Error::NoConvergence {
            iterations: iterations.unwrap_or(0),
            residual: residual_norm,
        });
    }
    let level_coeffs = (0..=asm.order)
        .map(|k| asm.level(k, &a).map(CoeffVector::new))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSolution {
        order: asm.order,
        init_vectors: asm.init[..asm.order]
            .iter()
            .cloned()
            .map(CoeffVector::new)
            .collect(),
        a_vector: CoeffVector::new(a),
        level_coeffs,
        m_matrix: ops.basis().m_matrix().clone(),
        newton_iterations: iterations,
        residual_norm,
    })
}

/// Solves a problem given in exact rationals with `f64` working arithmetic.
///
/// Linear problems are refined against the exact residual `L A + r₀`, assembled over
/// [`Rational`] from the exact data inside `ops`; each sweep solves for a correction
/// with the `f64` factorisation of the same matrix. The returned coefficients are
/// accurate to the rounding of the exact Galerkin solution rather than to the
/// conditioning of `L`. Nonlinear problems fall back to [`solve_with`].
pub fn solve_mixed(
    problem: &IvpProblem<Rational>,
    ops: &OperationalSet<f64>,
    options: &SolveOptions,
) -> Result<SpectralSolution<f64>> {
    let float_problem = problem.to_f64();
    if !problem.is_linear() {
        return solve_with(&float_problem, ops, options);
    }
    let exact_ops = ops.to_exact();
    let exact = Assembly::new(problem, &exact_ops, options.product)?;
    let (mut lin, mut r0) = exact.linear_part()?;
    if options.system == GalerkinSystem::Projected {
        let dual = exact_ops.basis().dual_exact();
        lin = dual.mul(&lin)?;
        r0 = dual.mul_vec(&r0)?;
    }
    let lu = lin.convert::<f64>().lu()?;
    let neg_r0: Vec<f64> = r0.iter().map(|v| -f64::from_rational(v)).collect();
    let mut a = lu.solve(&neg_r0)?;
    for _ in 0..MIXED_SWEEPS {
        let a_exact = a.iter().map(|&v| rational_from_f64(v)).collect::<Result<Vec<_>>>()?;
        let mut r = lin.mul_vec(&a_exact)?;
        add_assign(&mut r, &r0);
        if r.iter().all(Zero::is_zero) {
            break;
        }
        let neg_r: Vec<f64> = r.iter().map(|v| -f64::from_rational(v)).collect();
        let delta = lu.solve(&neg_r)?;
        if delta.iter().all(|d| *d == 0.0) {
            break;
        }
        add_assign(&mut a, &delta);
    }
    let asm = Assembly::new(&float_problem, ops, options.product)?;
    finish(&asm, ops, a, None, options)
}

const MIXED_SWEEPS: usize = 6;

fn negate<T: Scalar>(v: Vec<T>) -> Vec<T> {
    v.into_iter().map(|x| -x).collect()
}

#[allow(clippy::type_complexity)]
fn newton<T: Scalar>(
    asm: &Assembly<'_, T>,
    linear: &Matrix<T>,
    mut a: Vec<T>,
    options: &SolveOptions,
    project: &dyn Fn(Vec<T>) -> Result<Vec<T>>,
    project_mat: &dyn Fn(Matrix<T>) -> Result<Matrix<T>>,
    iterations: &mut Option<usize>,
) -> Result<Vec<T>> {
    let cfg = &options.newton;
    let mut r = asm.residual(&a)?;
    let mut f = project(r.clone())?;
    let mut f_norm = norm_2(&f);
    let backtrack = T::from_f64(cfg.backtrack).expect("finite backtracking factor");
    for it in 0..cfg.max_iterations {
        if norm_inf(&r) <= cfg.tolerance {
            *iterations = Some(it);
            return Ok(a);
        }
        let jac = project_mat(asm.jacobian(linear, &a)?)?;
        let delta = jac.solve(&negate(f.clone()))?;

        let mut step = T::one();
        let mut t = 1.0;
        loop {
            let trial: Vec<T> = a
                .iter()
                .zip(&delta)
                .map(|(x, d)| x.clone() + step.clone() * d.clone())
                .collect();
            let r_trial = asm.residual(&trial)?;
            let f_trial = project(r_trial.clone())?;
            let trial_norm = norm_2(&f_trial);
            let accept = trial_norm <= (1.0 - cfg.armijo * t) * f_norm;
            if accept || t * cfg.backtrack < cfg.min_step {
                a = trial;
                r = r_trial;
                f = f_trial;
                f_norm = trial_norm;
                break;
            }
            step = step * backtrack.clone();
            t *= cfg.backtrack;
        }
    }
    let final_norm = norm_inf(&r);
    if final_norm <= cfg.tolerance {
        *iterations = Some(cfg.max_iterations);
        return Ok(a);
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual: final_norm,
    })
}
