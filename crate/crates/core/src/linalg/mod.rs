//! Dense exact matrices over Q, Q(t) and tower scalars.

mod eigen;
mod jordan;

pub use eigen::{
    charpoly, is_diagonalizable, minpoly, rational_eigen_decomp, quadratic_eigendata, rational_eigenvalues,
    EigenData, QuadraticNumber,
};
pub use jordan::{jordan_form_rational, JordanData};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{RatFunc, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("rows have different lengths")]
    Ragged,
    #[error("{expected} entries expected, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("not all eigenvalues are rational")]
    NotAllRational,
    #[error("matrix is not diagonalizable")]
    NotDiagonalizable,
}

/// Commutative ring elements usable as matrix entries.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

pub trait FieldScalar: Scalar {
    fn inverse(&self) -> Option<Self>;
}

impl FieldScalar for Rational {
    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl FieldScalar for RatFunc {
    fn inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| T::one()).collect())
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self, LinalgError> {
        Ok(Self::from_rows(cols.to_vec())?.transpose())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Result<T, LinalgError> {
        let n = self.require_square()?;
        Ok((0..n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_upper_triangular() && self.transpose().is_upper_triangular()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch { left: self.shape(), right: other.shape() });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = std::mem::replace(&mut out.data[i * other.cols + j], T::zero());
                        out.data[i * other.cols + j] = cur + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn pow(&self, e: u32) -> Result<Self, LinalgError> {
        let n = self.require_square()?;
        let mut out = Self::identity(n);
        for _ in 0..e {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a.clone() * other.get(k, l).clone());
                    }
                }
            }
        }
        out
    }

    /// Kronecker sum `A ⊗ I + I ⊗ B`.
    pub fn kron_sum(a: &Self, b: &Self) -> Result<Self, LinalgError> {
        let n = a.require_square()?;
        let m = b.require_square()?;
        a.kron(&Self::identity(m)).try_add(&Self::identity(n).kron(b))
    }

    /// Iterated Kronecker sum of a nonempty list.
    pub fn kron_sum_all(list: &[Self]) -> Result<Self, LinalgError> {
        let (first, rest) = list.split_first().expect("nonempty list");
        let mut acc = first.clone();
        acc.require_square()?;
        for m in rest {
            acc = Self::kron_sum(&acc, m)?;
        }
        Ok(acc)
    }

    /// `k`-fold Kronecker sum of `self` with itself.
    pub fn kron_power(&self, k: usize) -> Result<Self, LinalgError> {
        assert!(k >= 1, "power must be positive");
        Self::kron_sum_all(&vec![self.clone(); k])
    }

    /// Characteristic polynomial `det(xI - A)` by the division-free Berkowitz
    /// algorithm; coefficients from the leading 1 down to the constant term.
    pub fn berkowitz(&self) -> Result<Vec<T>, LinalgError> {
        let n = self.require_square()?;
        let mut v = vec![T::one()];
        for r in 0..n {
            let mut toeplitz = vec![T::one(), -self.get(r, r).clone()];
            let mut col: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..r {
                let rc = (0..r).fold(T::zero(), |acc, j| {
                    let a = self.get(r, j);
                    if a.is_zero() || col[j].is_zero() {
                        acc
                    } else {
                        acc + a.clone() * col[j].clone()
                    }
                });
                toeplitz.push(-rc);
                col = (0..r)
                    .map(|i| {
                        (0..r).fold(T::zero(), |acc, j| {
                            let a = self.get(i, j);
                            if a.is_zero() || col[j].is_zero() {
                                acc
                            } else {
                                acc + a.clone() * col[j].clone()
                            }
                        })
                    })
                    .collect();
            }
            let next = (0..r + 2)
                .map(|i| {
                    (0..=i.min(r)).fold(T::zero(), |acc, j| {
                        let a = &toeplitz[i - j];
                        if a.is_zero() || v[j].is_zero() {
                            acc
                        } else {
                            acc + a.clone() * v[j].clone()
                        }
                    })
                })
                .collect();
            v = next;
        }
        Ok(v)
    }

    /// Division-free determinant, valid over any commutative ring.
    pub fn determinant(&self) -> Result<T, LinalgError> {
        let n = self.require_square()?;
        let c = self.berkowitz()?.pop().expect("nonempty");
        Ok(if n % 2 == 0 { c } else { -c })
    }
}

impl<T: FieldScalar> Matrix<T> {
    /// Reduced row echelon form and pivot columns; pivots are the first
    /// nonzero entry below the current row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, col).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, col).inverse().expect("nonzero pivot");
            for j in col..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column in increasing order.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![T::zero(); self.cols];
                x[f] = T::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r.get(row, f).clone();
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let n = self.require_square()?;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, T::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_leading<T: FieldScalar>(v: &mut [T]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        let inv = lead.inverse().expect("nonzero");
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix shapes must agree")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix shapes must agree")
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix shapes must agree")
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{}", self.rows, self.cols, self)
    }
}

/// Builds a rational matrix from integer numerator/denominator pairs; test helper.
pub fn qmat(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
    Matrix::from_rows(
        rows.iter().map(|r| r.iter().map(|&(n, d)| crate::arith::rat(n, d)).collect()).collect(),
    )
    .expect("rectangular")
}

/// Builds an integer-entry rational matrix.
pub fn imat(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&n| crate::arith::rat_int(n)).collect()).collect())
        .expect("rectangular")
}
