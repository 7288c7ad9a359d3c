//! Small dense row-major matrices over any [`Scalar`].
//!
//! Sizes here never exceed a few dozen rows, so everything is plain `Vec` storage and
//! textbook algorithms. Elimination uses partial pivoting by magnitude, which for
//! [`Rational`](crate::Rational) simply picks the largest exact pivot.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    /// `selfᵀ * v`, i.e. the row vector `vᵀ self` as a column.
    pub fn tr_mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = o.clone() + vi.clone() * a.clone();
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Argument("power of a non-square matrix".into()));
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.as_f64().abs()).fold(0.0, f64::max)
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::new(self.clone())
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        self.lu()?.solve(b)
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = lu.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> Result<T> {
        match self.lu() {
            Ok(lu) => Ok(lu.determinant()),
            Err(Error::Singular { .. }) => Ok(T::zero()),
            Err(e) => Err(e),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(())
    }
}

impl Matrix<Rational> {
    /// One-time conversion of exact data into the working scalar.
    pub fn convert<U: Scalar>(&self) -> Matrix<U> {
        self.map(U::from_rational)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn axpy<T: Scalar>(alpha: &T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| alpha.clone() * xi.clone() + yi.clone())
        .collect()
}

pub fn norm_inf<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.as_f64().abs()).fold(0.0, f64::max)
}

pub fn norm_2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.as_f64().powi(2)).sum::<f64>().sqrt()
}

/// Packed LU factors `P A = L U` with unit-diagonal `L`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    factors: Matrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Scalar> Lu<T> {
    fn new(mut a: Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Argument(format!(
                "LU of a non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let cand = a[(i, k)].abs();
                if cand > best {
                    best = cand;
                    p = i;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular { column: k });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let upd = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = upd;
                }
                a[(i, k)] = factor;
            }
        }
        Ok(Self {
            factors: a,
            perm,
            swaps,
        })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.factors.rows;
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = y[i].clone() - self.factors[(i, j)].clone() * y[j].clone();
                y[i] = upd;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let upd = y[i].clone() - self.factors[(i, j)].clone() * y[j].clone();
                y[i] = upd;
            }
            y[i] = y[i].checked_quotient(&self.factors[(i, i)])?;
        }
        Ok(y)
    }

    pub fn determinant(&self) -> T {
        let n = self.factors.rows;
        let mut det = (0..n).fold(T::one(), |acc, i| acc * self.factors[(i, i)].clone());
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn exact_inverse_of_hilbert() {
        let h = Matrix::from_fn(4, 4, |i, j| ratio(1, (i + j + 1) as i64));
        let inv = h.inverse().unwrap();
        assert_eq!(h.mul(&inv).unwrap(), Matrix::identity(4));
        assert_eq!(inv[(0, 0)], ratio(16, 1));
    }

    #[test]
    fn singular_is_reported() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::Singular { .. })));
        assert_eq!(m.determinant().unwrap(), 0.0);
    }

    #[test]
    fn pivoting_and_determinant() {
        let m = Matrix::from_rows(vec![
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(2, 1), ratio(3, 1)],
        ])
        .unwrap();
        assert_eq!(m.determinant().unwrap(), ratio(-2, 1));
        assert_eq!(m.solve(&[ratio(1, 1), ratio(5, 1)]).unwrap(), vec![ratio(1, 1), ratio(1, 1)]);
    }

    #[test]
    fn transpose_products() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(m.tr_mul_vec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        assert_eq!(m.mul_vec(&[1.0, 0.0, 1.0]).unwrap(), vec![4.0, 10.0]);
        assert!(m.mul(&m).is_err());
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
