//! Derivative, integration and product operational matrices on Bernoulli coefficients.
//!
//! For the basis vector `B(x) = [B_0(x), ..., B_N(x)]ᵀ`:
//!
//! * `d/dx B(x) = 𝒟 B(x)` exactly,
//! * `∫₀ˣ B(t) dt ≈ ℐ B(x)`, exact in rows `0..N`, last row an L² projection,
//! * `B(x) Bᵀ(x) c ≈ C̃ B(x)`, either with monomials above degree `N` dropped
//!   ([`ProductRule::Truncated`]) or with the full product projected back onto the
//!   basis in L² ([`ProductRule::Projected`]).
//!
//! A function `f = aᵀB` therefore has derivative coefficients `𝒟ᵀa`, antiderivative
//! coefficients `ℐᵀa`, and `f · (cᵀB)` has coefficients `C̃ᵀa`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::basis::{product_integral, BasisContext, CoeffVector};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{rational_to_f64, Rational, Scalar};

/// `𝒟[(i, i-1)] = i`, zero elsewhere.
pub fn build_derivative_matrix<T: Scalar>(order: usize) -> Matrix<T> {
    Matrix::from_fn(order + 1, order + 1, |i, j| {
        if i == j + 1 {
            T::from_usize_exact(i)
        } else {
            T::zero()
        }
    })
}

/// Integration matrix `ℐ = U Q` and the overflow projection `Ξ`, in exact arithmetic.
///
/// Row `i < N` of `U` holds the monomial coefficients of `(B_{i+1}(x) - B_{i+1}) / (i+1)`;
/// the last row is `Ξᵀ M`, where `Ξ` is the best approximation of
/// `(B_{N+1}(x) - B_{N+1}) / (N+1)` in the span of `B_0..B_N`. The right-hand side
/// `⟨·, B_j⟩` of that projection is evaluated in closed form, so no quadrature is involved.
pub fn build_integration_matrix<T: Scalar>(
    ctx: &BasisContext<T>,
) -> Result<(Matrix<Rational>, CoeffVector<Rational>)> {
    let n = ctx.order();
    let dim = n + 1;
    let table = ctx.table();
    if table.len() < 2 * n + 2 {
        return Err(Error::Argument(format!(
            "integration matrix needs B_0..B_{}",
            2 * n + 1
        )));
    }
    let xi = overflow_projection(ctx)?;

    let m = ctx.m_exact();
    let mut u = Matrix::<Rational>::zeros(dim, dim);
    for i in 0..n {
        let deg = i + 1;
        let inv = Rational::new(BigInt::one(), BigInt::from(deg));
        for p in 1..=deg {
            u[(i, p)] = &m[(deg, p)] * &inv;
        }
    }
    let last = m.tr_mul_vec(xi.as_slice())?;
    for (p, v) in last.into_iter().enumerate() {
        u[(n, p)] = v;
    }
    let integ = u.mul(ctx.q_exact())?;
    Ok((integ, xi))
}

fn overflow_projection<T: Scalar>(ctx: &BasisContext<T>) -> Result<CoeffVector<Rational>> {
    let n = ctx.order();
    let table = ctx.table();
    let top = n + 1;
    let inv_top = Rational::new(BigInt::one(), BigInt::from(top));
    let b_top = table.numbers()[top].clone();
    let mut g = Vec::with_capacity(n + 1);
    g.push(-&b_top * &inv_top);
    for j in 1..=n {
        g.push(product_integral(table, top, j) * &inv_top);
    }
    let xi = ctx
        .dual_inverse_exact()
        .mul_vec(&g)
        .map_err(|_| Error::Consistency("dual matrix solve failed".into()))?;
    Ok(CoeffVector::new(xi))
}

/// Product operational matrix `C̃ = M Ñ Q` for the coefficient vector `c`.
///
/// `Ñ` is the upper-triangular Toeplitz matrix built from `n = Mᵀc`, i.e. the monomial
/// coefficients of `cᵀB`. Row `i` of `Ñ T(x)` is `x^i · (cᵀB)(x)` with every power above
/// `x^N` discarded, so `(aᵀB)(cᵀB)` is reproduced exactly whenever its degree is at most `N`.
pub fn build_product_matrix<T: Scalar>(ctx: &BasisContext<T>, c: &[T]) -> Result<Matrix<T>> {
    ctx.check_len(c.len())?;
    let dim = ctx.dim();
    let mono = ctx.m_matrix().tr_mul_vec(c)?;
    let toeplitz = Matrix::from_fn(dim, dim, |i, j| {
        if j >= i {
            mono[j - i].clone()
        } else {
            T::zero()
        }
    });
    ctx.m_matrix().mul(&toeplitz)?.mul(ctx.q_matrix())
}

/// Exact L² projections of the monomials `x^0..x^{top}` onto `B_0..B_N`, one per row.
///
/// Rows `p ≤ N` coincide with the rows of `Q`. Higher rows solve `D w = g` with
/// `g_j = ∫₀¹ x^p B_j(x) dx = Σ_l M[j][l] / (p + l + 1)`.
pub fn build_monomial_projection<T: Scalar>(ctx: &BasisContext<T>, top: usize) -> Result<Matrix<Rational>> {
    let dim = ctx.dim();
    let m = ctx.m_exact();
    let q = ctx.q_exact();
    let mut out = Matrix::<Rational>::zeros(top + 1, dim);
    for p in 0..=top {
        if p < dim {
            for j in 0..dim {
                out[(p, j)] = q[(p, j)].clone();
            }
            continue;
        }
        let g: Vec<Rational> = (0..dim)
            .map(|j| {
                (0..=j).fold(Rational::zero(), |acc, l| {
                    acc + &m[(j, l)] / Rational::from_integer(BigInt::from(p + l + 1))
                })
            })
            .collect();
        let w = ctx.dual_inverse_exact().mul_vec(&g)?;
        for (j, v) in w.into_iter().enumerate() {
            out[(p, j)] = v;
        }
    }
    Ok(out)
}

/// Exact coefficients of the projected pairwise products: `Π(B_i B_k) = Σ_j T_k[(i, j)] B_j`.
///
/// The monomial coefficients of `B_i B_k` are convolved exactly and mapped back to the
/// basis with [`build_monomial_projection`].
pub fn build_product_tensor<T: Scalar>(ctx: &BasisContext<T>) -> Result<Vec<Matrix<Rational>>> {
    let dim = ctx.dim();
    let m = ctx.m_exact();
    let proj = build_monomial_projection(ctx, 2 * ctx.order())?;
    let mut tensor = vec![Matrix::<Rational>::zeros(dim, dim); dim];
    for i in 0..dim {
        for k in i..dim {
            let mut mono = vec![Rational::zero(); i + k + 1];
            for p in 0..=i {
                for q in 0..=k {
                    mono[p + q] += &m[(i, p)] * &m[(k, q)];
                }
            }
            let row = proj.tr_mul_vec(&pad(mono, 2 * dim - 1))?;
            for (j, v) in row.into_iter().enumerate() {
                tensor[k][(i, j)] = v.clone();
                tensor[i][(k, j)] = v;
            }
        }
    }
    Ok(tensor)
}

fn pad(mut v: Vec<Rational>, len: usize) -> Vec<Rational> {
    v.resize(len, Rational::zero());
    v
}

/// Product operational matrix with L² projection of the overflow, `C̃ = Σ_k c_k T_k`.
///
/// Row `i` is the best approximation of `B_i · (cᵀB)` in the span of `B_0..B_N`;
/// `tensor` comes from [`build_product_tensor`].
pub fn build_projected_product_matrix<T: Scalar>(tensor: &[Matrix<T>], c: &[T]) -> Result<Matrix<T>> {
    if tensor.len() != c.len() {
        return Err(Error::Dimension {
            expected: tensor.len(),
            got: c.len(),
        });
    }
    let dim = c.len();
    let mut out = Matrix::zeros(dim, dim);
    for (t, ck) in tensor.iter().zip(c) {
        if ck.is_zero() {
            continue;
        }
        out = out.add(&t.scale(ck))?;
    }
    Ok(out)
}

/// How products of two expansions are brought back to degree `N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProductRule {
    /// Orthogonal projection of the full degree-`2N` product.
    #[default]
    Projected,
    /// Monomials above `x^N` are dropped.
    Truncated,
}

/// Operational matrices for one truncation order, in the working scalar `T`.
///
/// The exact rational `ℐ` and `Ξ` are kept alongside for diagnostics.
#[derive(Clone, Debug)]
pub struct OperationalSet<T: Scalar = f64> {
    basis: BasisContext<T>,
    deriv: Matrix<T>,
    integ: Matrix<T>,
    xi: CoeffVector<T>,
    integ_exact: Matrix<Rational>,
    xi_exact: CoeffVector<Rational>,
    tensor: Vec<Matrix<T>>,
    tensor_exact: Vec<Matrix<Rational>>,
}

impl<T: Scalar> OperationalSet<T> {
    pub fn new(order: usize) -> Result<Self> {
        Self::from_basis(BasisContext::new(order)?)
    }

    pub fn from_basis(basis: BasisContext<T>) -> Result<Self> {
        let deriv = build_derivative_matrix(basis.order());
        let (integ_exact, xi_exact) = build_integration_matrix(&basis)?;
        let tensor_exact = build_product_tensor(&basis)?;
        Ok(Self {
            tensor: tensor_exact.iter().map(Matrix::convert).collect(),
            tensor_exact,
            deriv,
            integ: integ_exact.convert(),
            xi: xi_exact.map(T::from_rational),
            integ_exact,
            xi_exact,
            basis,
        })
    }

    /// The same operators over [`Rational`], reusing the exact data kept alongside.
    pub fn to_exact(&self) -> OperationalSet<Rational> {
        OperationalSet {
            basis: self.basis.to_exact(),
            deriv: build_derivative_matrix(self.order()),
            integ: self.integ_exact.clone(),
            xi: self.xi_exact.clone(),
            integ_exact: self.integ_exact.clone(),
            xi_exact: self.xi_exact.clone(),
            tensor: self.tensor_exact.clone(),
            tensor_exact: self.tensor_exact.clone(),
        }
    }

    pub fn basis(&self) -> &BasisContext<T> {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn derivative(&self) -> &Matrix<T> {
        &self.deriv
    }

    pub fn integration(&self) -> &Matrix<T> {
        &self.integ
    }

    pub fn xi(&self) -> &CoeffVector<T> {
        &self.xi
    }

    pub fn integration_exact(&self) -> &Matrix<Rational> {
        &self.integ_exact
    }

    pub fn xi_exact(&self) -> &CoeffVector<Rational> {
        &self.xi_exact
    }

    /// Truncated product matrix, see [`build_product_matrix`].
    pub fn product(&self, c: &[T]) -> Result<Matrix<T>> {
        build_product_matrix(&self.basis, c)
    }

    /// Projected product matrix, see [`build_projected_product_matrix`].
    pub fn projected_product(&self, c: &[T]) -> Result<Matrix<T>> {
        self.basis.check_len(c.len())?;
        build_projected_product_matrix(&self.tensor, c)
    }

    pub fn product_with(&self, rule: ProductRule, c: &[T]) -> Result<Matrix<T>> {
        match rule {
            ProductRule::Projected => self.projected_product(c),
            ProductRule::Truncated => self.product(c),
        }
    }

    /// `T_k` of [`build_product_tensor`], in the working scalar.
    pub fn product_tensor(&self) -> &[Matrix<T>] {
        &self.tensor
    }

    /// Coefficients of `f'` for `f = aᵀB`.
    pub fn differentiate(&self, a: &[T]) -> Result<Vec<T>> {
        self.deriv.tr_mul_vec(a)
    }

    /// Coefficients of the (approximate) antiderivative `∫₀ˣ f` for `f = aᵀB`.
    pub fn integrate(&self, a: &[T]) -> Result<Vec<T>> {
        self.integ.tr_mul_vec(a)
    }

    /// Coefficients of the truncated product `(aᵀB)(cᵀB)`, computed as `C̃ᵀa`.
    pub fn multiply(&self, a: &[T], c: &[T]) -> Result<Vec<T>> {
        self.product(c)?.tr_mul_vec(a)
    }

    /// L² norm of `∫₀ˣ B_N(t) dt - (ℐ B)_N(x)` on `[0, 1]`.
    ///
    /// With `f = (B_{N+1}(x) - B_{N+1})/(N+1)`, orthogonality gives
    /// `‖f - ΞᵀB‖² = ‖f‖² - Ξᵀ D Ξ`, all of it exact.
    pub fn last_row_residual_norm(&self) -> f64 {
        let n = self.order();
        let top = n + 1;
        let table = self.basis.table();
        let b_top = &table.numbers()[top];
        let f_sq = (product_integral(table, top, top) + b_top * b_top)
            / Rational::from_integer(BigInt::from(top * top));
        let d_xi = self
            .basis
            .dual_exact()
            .mul_vec(self.xi_exact.as_slice())
            .expect("square dual matrix");
        let proj_sq = self
            .xi_exact
            .as_slice()
            .iter()
            .zip(&d_xi)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        rational_to_f64(&(f_sq - proj_sq)).max(0.0).sqrt()
    }
}
