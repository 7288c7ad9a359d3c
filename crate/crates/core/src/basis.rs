//! Bernoulli numbers, Bernoulli polynomials and the exact basis-change data.
//!
//! Everything in this module is constructed over [`Rational`] first. A [`BasisContext`]
//! keeps the exact matrices and a one-time conversion into its working scalar `T`.
//!
//! Index conventions are 0-based throughout: row `i` of `M` holds the ascending monomial
//! coefficients of `B_i(x)`, and `D[(i, j)] = ∫₀¹ B_i(x) B_j(x) dx`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::quadrature::{integrate_adaptive, DEFAULT_REL_TOL};
use crate::scalar::{Rational, Scalar};

/// Exact Bernoulli numbers `B_0, B_1, ...` with the `B_1 = -1/2` convention.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliTable {
    numbers: Vec<Rational>,
}

impl BernoulliTable {
    /// Table long enough for every matrix of truncation order `order`: `B_0..B_{2N+2}`.
    pub fn for_order(order: usize) -> Result<Self> {
        bernoulli_numbers(2 * order + 3)
    }

    pub fn numbers(&self) -> &[Rational] {
        &self.numbers
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&Rational> {
        self.numbers.get(k)
    }

    fn require(&self, needed: usize, what: &str) -> Result<()> {
        if self.numbers.len() < needed {
            return Err(Error::Argument(format!(
                "{what} needs B_0..B_{} but the table only holds {} numbers",
                needed - 1,
                self.numbers.len()
            )));
        }
        Ok(())
    }
}

/// `B_0..B_{count-1}` from Kronecker's double sum, checked against the Pascal recurrence.
pub fn bernoulli_numbers(count: usize) -> Result<BernoulliTable> {
    if count == 0 {
        return Err(Error::Argument("at least one Bernoulli number must be requested".into()));
    }
    let numbers: Vec<Rational> = (0..count).map(kronecker_bernoulli).collect();
    let check = bernoulli_numbers_by_recurrence(count)?;
    if let Some(k) = (0..count).find(|&k| numbers[k] != check[k]) {
        return Err(Error::Consistency(format!(
            "Kronecker sum gives B_{k} = {} but the recurrence gives {}",
            numbers[k], check[k]
        )));
    }
    Ok(BernoulliTable { numbers })
}

/// Kronecker's closed form
/// `B_n = -Σ_{k=1}^{n+1} (-1)^k / k · C(n+1, k) · Σ_{j=1}^{k} j^n`,
/// valid for `n ≠ 1`; `B_1` is fixed at `-1/2`.
pub fn kronecker_bernoulli(n: usize) -> Rational {
    if n == 1 {
        return Rational::new(BigInt::from(-1), BigInt::from(2));
    }
    let n1 = BigInt::from(n + 1);
    let mut power_sum = BigInt::zero();
    let mut total = Rational::zero();
    for k in 1..=n + 1 {
        power_sum += num_traits::pow(BigInt::from(k), n);
        let term = Rational::new(
            binomial(n1.clone(), BigInt::from(k)) * &power_sum,
            BigInt::from(k),
        );
        if k % 2 == 0 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

/// `Σ_{k=0}^{n} C(n+1, k) B_k = 0` solved for `B_n`, `n ≥ 1`.
pub fn bernoulli_numbers_by_recurrence(count: usize) -> Result<Vec<Rational>> {
    if count == 0 {
        return Err(Error::Argument("at least one Bernoulli number must be requested".into()));
    }
    let mut b: Vec<Rational> = Vec::with_capacity(count);
    b.push(Rational::one());
    for n in 1..count {
        let n1 = BigInt::from(n + 1);
        let s = (0..n).fold(Rational::zero(), |acc, k| {
            acc + &b[k] * Rational::from_integer(binomial(n1.clone(), BigInt::from(k)))
        });
        b.push(-s / Rational::from_integer(n1));
    }
    Ok(b)
}

fn binom(n: usize, k: usize) -> Rational {
    Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

/// `M` with `B(x) = M T(x)`: `M[(i, j)] = C(i, j) B_{i-j}` for `j ≤ i`.
pub fn build_m_matrix(table: &BernoulliTable, order: usize) -> Result<Matrix<Rational>> {
    table.require(order + 1, "M")?;
    Ok(Matrix::from_fn(order + 1, order + 1, |i, j| {
        if j <= i {
            binom(i, i - j) * &table.numbers[i - j]
        } else {
            Rational::zero()
        }
    }))
}

/// `Q` with `Q B(x) = T(x)`: `Q[(i, j)] = C(i+1, j) / (i+1)` for `j ≤ i`.
pub fn build_q_matrix(table: &BernoulliTable, order: usize) -> Result<Matrix<Rational>> {
    table.require(order + 1, "Q")?;
    Ok(Matrix::from_fn(order + 1, order + 1, |i, j| {
        if j <= i {
            binom(i + 1, j) / Rational::from_integer(BigInt::from(i + 1))
        } else {
            Rational::zero()
        }
    }))
}

/// `∫₀¹ B_n B_m dx` for `n, m ≥ 1` via `(-1)^{n-1} n! m! / (n+m)! · B_{n+m}`.
pub(crate) fn product_integral(table: &BernoulliTable, n: usize, m: usize) -> Rational {
    debug_assert!(n >= 1 && m >= 1);
    // n! m! / (n+m)! = 1 / C(n+m, n)
    let v = &table.numbers[n + m] / binom(n + m, n);
    if n % 2 == 1 {
        v
    } else {
        -v
    }
}

/// Gram matrix of the basis on `[0, 1]`.
///
/// Row and column 0 are set analytically (`∫₀¹ B_n = 0` for `n ≥ 1`); the closed form
/// is only applied when both indices are at least 1.
pub fn build_dual_matrix(table: &BernoulliTable, order: usize) -> Result<Matrix<Rational>> {
    table.require(2 * order + 1, "the dual matrix")?;
    Ok(Matrix::from_fn(order + 1, order + 1, |i, j| match (i, j) {
        (0, 0) => Rational::one(),
        (0, _) | (_, 0) => Rational::zero(),
        _ => product_integral(table, i, j),
    }))
}

/// Coefficients of `p(x) = Σ entries[i] B_i(x)`, length `N + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> CoeffVector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Self { entries }
    }

    pub fn zeros(order: usize) -> Self {
        Self::new(vec![T::zero(); order + 1])
    }

    pub fn unit(order: usize, k: usize) -> Self {
        let mut v = Self::zeros(order);
        v.entries[k] = T::one();
        v
    }

    pub fn order(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CoeffVector<U> {
        CoeffVector::new(self.entries.iter().map(f).collect())
    }
}

impl<T> std::ops::Index<usize> for CoeffVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}

impl<T> From<Vec<T>> for CoeffVector<T> {
    fn from(entries: Vec<T>) -> Self {
        Self { entries }
    }
}

/// All basis data for one truncation order `N`, exact and in the working scalar `T`.
///
/// Immutable once built; share it freely between threads.
#[derive(Clone, Debug)]
pub struct BasisContext<T: Scalar = f64> {
    order: usize,
    table: BernoulliTable,
    m_exact: Matrix<Rational>,
    q_exact: Matrix<Rational>,
    dual_exact: Matrix<Rational>,
    dual_inverse_exact: Matrix<Rational>,
    /// Row `k`: Bernoulli coefficients of the shifted Legendre polynomial `P̃_k`.
    legendre: Matrix<f64>,
    m: Matrix<T>,
    q: Matrix<T>,
    dual: Matrix<T>,
    dual_inverse: Matrix<T>,
}

impl<T: Scalar> BasisContext<T> {
    pub fn new(order: usize) -> Result<Self> {
        let table = BernoulliTable::for_order(order)?;
        let m_exact = build_m_matrix(&table, order)?;
        let q_exact = build_q_matrix(&table, order)?;
        if q_exact.mul(&m_exact)? != Matrix::identity(order + 1) {
            return Err(Error::Consistency(format!("Q·M ≠ I at order {order}")));
        }
        let dual_exact = build_dual_matrix(&table, order)?;
        let dual_inverse_exact = dual_exact.inverse()?;
        let legendre = shifted_legendre_monomials(order)
            .mul(&q_exact)?
            .convert();
        Ok(Self {
            legendre,
            order,
            m: m_exact.convert(),
            q: q_exact.convert(),
            dual: dual_exact.convert(),
            dual_inverse: dual_inverse_exact.convert(),
            table,
            m_exact,
            q_exact,
            dual_exact,
            dual_inverse_exact,
        })
    }

    /// The same basis with the exact matrices as working scalar; nothing is recomputed.
    pub fn to_exact(&self) -> BasisContext<Rational> {
        BasisContext {
            order: self.order,
            table: self.table.clone(),
            legendre: self.legendre.clone(),
            m: self.m_exact.clone(),
            q: self.q_exact.clone(),
            dual: self.dual_exact.clone(),
            dual_inverse: self.dual_inverse_exact.clone(),
            m_exact: self.m_exact.clone(),
            q_exact: self.q_exact.clone(),
            dual_exact: self.dual_exact.clone(),
            dual_inverse_exact: self.dual_inverse_exact.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of basis functions, `N + 1`.
    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn table(&self) -> &BernoulliTable {
        &self.table
    }

    pub fn m_exact(&self) -> &Matrix<Rational> {
        &self.m_exact
    }

    pub fn q_exact(&self) -> &Matrix<Rational> {
        &self.q_exact
    }

    pub fn dual_exact(&self) -> &Matrix<Rational> {
        &self.dual_exact
    }

    pub fn dual_inverse_exact(&self) -> &Matrix<Rational> {
        &self.dual_inverse_exact
    }

    pub fn m_matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn q_matrix(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn dual_matrix(&self) -> &Matrix<T> {
        &self.dual
    }

    pub fn dual_inverse(&self) -> &Matrix<T> {
        &self.dual_inverse
    }

    /// `[B_0(x), ..., B_N(x)]`, each row of `M` evaluated by Horner's rule.
    pub fn eval_basis(&self, x: &T) -> Vec<T> {
        eval_rows(&self.m, x)
    }

    /// `Σ c_i B_i(x)`.
    pub fn eval(&self, coeffs: &[T], x: &T) -> Result<T> {
        self.check_len(coeffs.len())?;
        Ok(dot(coeffs, &self.eval_basis(x)))
    }

    /// Exact change of basis `T(x) → B(x)`: since `T = Q B`, the coefficients are `Qᵀ c`.
    pub fn expand_polynomial(&self, mono: &[T]) -> Result<CoeffVector<T>> {
        let degree = poly_degree(mono);
        if degree > self.order {
            return Err(Error::Argument(format!(
                "polynomial of degree {degree} exceeds truncation order {}",
                self.order
            )));
        }
        let mut padded = vec![T::zero(); self.dim()];
        for (p, c) in padded.iter_mut().zip(mono) {
            *p = c.clone();
        }
        Ok(CoeffVector::new(self.q.tr_mul_vec(&padded)?))
    }

    /// Ascending monomial coefficients of `Σ c_i B_i(x)`, i.e. `Mᵀ c`.
    pub fn to_monomial(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.check_len(coeffs.len())?;
        self.m.tr_mul_vec(coeffs)
    }

    /// Best L² approximation of `f` on `[0, 1]`, the solution of `D a = g` with
    /// `g_j = ⟨f, B_j⟩`.
    ///
    /// The Gram matrix of this basis is badly conditioned, so `D⁻¹ g` is not formed in
    /// floating point. The same vector is obtained as `a = Σ_k c_k L_k`, where
    /// `c_k = (2k+1) ⟨f, P̃_k⟩` are shifted-Legendre coefficients (adaptive Gauss–Legendre
    /// to relative tolerance `1e-14`) and `L_k` the exact Bernoulli expansion of `P̃_k`.
    /// Polynomials should go through [`expand_polynomial`](Self::expand_polynomial)
    /// instead, which is exact.
    pub fn project(&self, f: impl Fn(f64) -> f64) -> Result<CoeffVector<T>> {
        let mut c = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let ip = integrate_adaptive(
                |x| f(x) * shifted_legendre(k, x),
                0.0,
                1.0,
                DEFAULT_REL_TOL,
            )?;
            c.push((2 * k + 1) as f64 * ip);
        }
        let a = self.legendre.tr_mul_vec(&c)?;
        a.into_iter()
            .map(|v| {
                T::from_f64(v).ok_or_else(|| Error::Argument(format!("projection produced {v}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(CoeffVector::new)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }
}

/// Evaluates every row of a lower-triangular monomial-coefficient matrix at `x`.
pub fn eval_rows<T: Scalar>(m: &Matrix<T>, x: &T) -> Vec<T> {
    (0..m.rows())
        .map(|i| {
            let row = &m.row(i)[..=i.min(m.cols() - 1)];
            row.iter()
                .rev()
                .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
        })
        .collect()
}

/// `P̃_k(x) = P_k(2x - 1)` by the three-term recurrence.
pub fn shifted_legendre(k: usize, x: f64) -> f64 {
    let t = 2.0 * x - 1.0;
    let (mut p0, mut p1) = (1.0, t);
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let j = j as f64;
        let p2 = ((2.0 * j + 1.0) * t * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Row `k`: `P̃_k(x) = Σ_i (-1)^{k+i} C(k, i) C(k+i, i) x^i`.
fn shifted_legendre_monomials(order: usize) -> Matrix<Rational> {
    Matrix::from_fn(order + 1, order + 1, |k, i| {
        if i > k {
            return Rational::zero();
        }
        let v = binom(k, i) * binom(k + i, i);
        if (k + i) % 2 == 0 {
            v
        } else {
            -v
        }
    })
}

/// Index of the highest nonzero coefficient (0 for the zero polynomial).
pub fn poly_degree<T: Scalar>(mono: &[T]) -> usize {
    mono.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Exact `B_n(x)` straight from the defining sum `Σ_k C(n, k) B_k x^{n-k}`.
pub fn bernoulli_polynomial_exact(table: &BernoulliTable, n: usize, x: &Rational) -> Result<Rational> {
    table.require(n + 1, "B_n(x)")?;
    let mut acc = Rational::zero();
    for k in 0..=n {
        acc += binom(n, k) * &table.numbers[k] * num_traits::pow(x.clone(), n - k);
    }
    Ok(acc)
}
