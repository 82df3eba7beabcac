//! Exact arithmetic substrate: dense integer and rational matrices, a bit-packed
//! 01 matrix for incidence-heavy work, fraction-free rank and Kronecker products.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {found}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
}

/// Shorthand for building a rational from small integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
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

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn all_ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::one())
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn scale(&self, factor: &T) -> Self {
        self.map(|x| x * factor)
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Add<Output = T>,
{
    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch(other));
        }
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

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().cloned().fold(T::zero(), |acc, x| acc + x))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self.get(i, j).clone()))
            .collect()
    }

    fn mismatch(&self, other: &Self) -> MatrixError {
        MatrixError::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }
}

/// Exact matrix product.
pub fn mat_mul<T>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, MatrixError>
where
    T: Clone + Zero + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    if a.cols != b.rows {
        return Err(a.mismatch(b));
    }
    let mut data = vec![T::zero(); a.rows * b.cols];
    for i in 0..a.rows {
        let out = &mut data[i * b.cols..(i + 1) * b.cols];
        for (l, x) in a.row(i).iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(b.row(l)) {
                if !y.is_zero() {
                    *o = o.clone() + x * y;
                }
            }
        }
    }
    Ok(Matrix {
        rows: a.rows,
        cols: b.cols,
        data,
    })
}

/// Standard Kronecker product `a ⊗ b`.
pub fn kronecker<T>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T>
where
    T: Clone,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    Matrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
    })
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self, MatrixError> {
        Self::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    /// `a·I + b·J` of side `n`.
    pub fn identity_plus_ones(n: usize, a: i64, b: i64) -> Self {
        Self::from_fn(n, n, |i, j| BigInt::from(if i == j { a + b } else { b }))
    }
}

/// Rank over the rationals.
pub fn rank_exact(m: &RatMatrix) -> usize {
    // Clear denominators row by row; row scaling does not change rank.
    let rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    bareiss_rank(rows, m.cols())
}

pub fn rank_int(m: &IntMatrix) -> usize {
    let rows = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    bareiss_rank(rows, m.cols())
}

/// Fraction-free Gaussian elimination. After pivot step `r` every live entry is an
/// (r+1)-minor of the original, so each division by the previous pivot is exact.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let val = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = val / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Bit-packed 01 matrix. Row `i` occupies `words` consecutive u64s.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn all_ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] ^= 1 << (j % 64);
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn row_weight(&self, i: usize) -> u32 {
        self.row_words(i).iter().map(|w| w.count_ones()).sum()
    }

    pub fn row_weights(&self) -> Vec<u32> {
        (0..self.rows).map(|i| self.row_weight(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Entrywise complement `J − B`.
    pub fn complement(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| !self.get(i, j))
    }

    /// `|row_i(self) ∧ row_j(other)|`, i.e. entry (i, j) of `self · otherᵀ`.
    #[inline]
    pub fn and_count(&self, i: usize, other: &BitMatrix, j: usize) -> u32 {
        self.row_words(i)
            .iter()
            .zip(other.row_words(j))
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// `|row_i(self) ⊕ row_j(other)|`.
    #[inline]
    pub fn xor_count(&self, i: usize, other: &BitMatrix, j: usize) -> u32 {
        self.row_words(i)
            .iter()
            .zip(other.row_words(j))
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    /// Integer product `self · other` computed with popcounts.
    pub fn mul_counts(&self, other: &BitMatrix) -> Result<CountMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let ot = other.transpose();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                data.push(self.and_count(i, &ot, j));
            }
        }
        Ok(CountMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| BigInt::from(self.get(i, j) as u8))
    }

    /// Accepts only 0/1 entries; returns the first offending coordinate otherwise.
    pub fn from_int(m: &IntMatrix) -> Result<Self, (usize, usize)> {
        let mut b = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x = m.get(i, j);
                if x.is_one() {
                    b.set(i, j, true);
                } else if !x.is_zero() {
                    return Err((i, j));
                }
            }
        }
        Ok(b)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "  {}", padded.join("  "))?;
        }
        Ok(())
    }
}

/// Machine-word integer matrix produced by bit-matrix products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl CountMatrix {
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&c| c.checked_mul(c) == Some(n))
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}
