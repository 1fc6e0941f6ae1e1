//! Dense matrices and the entrywise operations used by the descriptors.
//!
//! Matrices here are deliberately plain: row-major storage, no sparsity.
//! Descriptor matrices are small (tens of rows) and fixtures are compared
//! entry by entry, so anything cleverer would only get in the way.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Matrix<T> {
    pub fn from_elem(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    n_cols
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: n_rows, cols: n_cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn n(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = T> + '_ {
        self.data.iter().copied()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl<T: Copy + PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl<T: Copy + PartialEq + std::ops::Neg<Output = T>> Matrix<T> {
    pub fn is_skew_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| self.get(i, j) == -self.get(j, i)))
    }
}

fn check_same_shape<A: Copy, B: Copy>(a: &Matrix<A>, b: &Matrix<B>) -> Result<()> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_elem(rows, cols, S::zero())
    }

    pub fn is_hollow(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.get(i, i) == S::zero())
    }

    /// Entrywise product, `C_ij = A_ij * B_ij`.
    pub fn hadamard_product(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        check_same_shape(self, other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).collect(),
        })
    }

    /// Entrywise division. A zero-by-zero entry becomes the undefined
    /// sentinel; a nonzero entry over zero is an error.
    pub fn hadamard_div(&self, other: &Matrix<S>) -> Result<ExtendedMatrix<S>> {
        check_same_shape(self, other)?;
        let mut data = Vec::with_capacity(self.data.len());
        for idx in 0..self.data.len() {
            let a = self.data[idx];
            let b = other.data[idx];
            if b == S::zero() {
                if a == S::zero() {
                    data.push(Entry::Omega);
                } else {
                    return Err(Error::IllPosedDivision {
                        row: idx / self.cols + 1,
                        col: idx % self.cols + 1,
                    });
                }
            } else {
                data.push(Entry::Finite(a / b));
            }
        }
        Ok(ExtendedMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Sum of absolute values over all entries.
    pub fn entrywise_l1(&self) -> S {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Number of exactly nonzero entries. Inputs are constructed, not
    /// measured, so no tolerance is applied.
    pub fn entrywise_l0(&self) -> usize {
        self.data.iter().filter(|v| **v != S::zero()).count()
    }

    pub fn scale(&self, c: S) -> Matrix<S> {
        self.map(|v| v * c)
    }

    /// True when the zero/nonzero patterns coincide.
    pub fn same_support(&self, other: &Matrix<S>) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(&a, &b)| (a == S::zero()) == (b == S::zero()))
    }
}

/// A matrix entry that is either a finite value or the "undefined" sentinel.
///
/// The sentinel marks physically undefined positions (diagonals of the
/// coefficient matrices) and must never silently enter arithmetic, so it is
/// a distinct variant rather than a reused number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Entry<S> {
    Finite(S),
    Omega,
}

impl<S: Scalar> Entry<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            Entry::Finite(v) => Some(v),
            Entry::Omega => None,
        }
    }

    pub fn is_omega(self) -> bool {
        matches!(self, Entry::Omega)
    }
}

/// Matrix over [`Entry`] values.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<Entry<S>>,
}

impl<S: Scalar> ExtendedMatrix<S> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Entry<S> {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<Entry<S>>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    /// Entrywise scale of the finite entries; sentinels stay put.
    pub fn scale(&self, c: S) -> ExtendedMatrix<S> {
        ExtendedMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|e| match e {
                    Entry::Finite(v) => Entry::Finite(*v * c),
                    Entry::Omega => Entry::Omega,
                })
                .collect(),
        }
    }
}
