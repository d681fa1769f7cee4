//! Exact rational arithmetic and dense linear algebra.
//!
//! Everything downstream (discrepancies, independence ranks, definiteness of
//! chain Gram matrices) runs through [`RatMatrix`]. Entries are arbitrary
//! precision fractions in lowest terms; there is no floating point anywhere.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary precision fraction, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` reduced. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: matrix has {expected} rows, vector has {found} entries")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinAlgError::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, LinAlgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    /// Build a symmetric Gram matrix, rejecting asymmetric input.
    pub fn gram(rows: Vec<Vec<Rational>>) -> Result<Self, LinAlgError> {
        let m = Self::from_rows(rows)?;
        if !m.is_symmetric() {
            return Err(LinAlgError::NotSymmetric);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_echelon(None)
    }

    /// Unique solution of `self * x = rhs`.
    pub fn solve_unique(&self, rhs: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if rhs.len() != self.rows {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.rows,
                found: rhs.len(),
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut b = rhs.to_vec();
        if m.row_echelon(Some(&mut b)) < n {
            return Err(LinAlgError::SingularMatrix);
        }
        // Back substitution; the echelon form of a nonsingular square matrix is
        // upper triangular with nonzero diagonal.
        let mut x = vec![Rational::zero(); n];
        for i in (0..n).rev() {
            let mut acc = b[i].clone();
            for j in i + 1..n {
                acc -= m.get(i, j) * &x[j];
            }
            x[i] = acc / m.get(i, i);
        }
        Ok(x)
    }

    /// Sylvester's criterion via symmetric elimination: negative definite iff
    /// every pivot taken in order without row exchanges is negative.
    /// Pivot `k` equals the ratio of leading minors `D_k / D_{k-1}`, so the
    /// minors alternate in sign starting negative exactly when all pivots are
    /// negative.
    pub fn is_negative_definite(&self) -> Result<bool, LinAlgError> {
        if !self.is_symmetric() {
            return Err(LinAlgError::NotSymmetric);
        }
        let n = self.rows;
        let mut m = self.clone();
        for k in 0..n {
            let pivot = m.get(k, k).clone();
            if !pivot.is_negative() {
                return Ok(false);
            }
            for r in k + 1..n {
                let f = m.get(r, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = m.get(r, c) - &f * m.get(k, c);
                    m.set(r, c, v);
                }
            }
        }
        Ok(true)
    }

    /// Leading principal minors `D_1, ..., D_n`.
    pub fn leading_minors(&self) -> Result<Vec<Rational>, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((1..=self.rows)
            .map(|k| {
                let mut sub = Self::zeros(k, k);
                for r in 0..k {
                    for c in 0..k {
                        sub.set(r, c, self.get(r, c).clone());
                    }
                }
                sub.determinant()
            })
            .collect())
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m.get(r, k).is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let pivot = m.get(k, k).clone();
            det *= &pivot;
            for r in k + 1..n {
                let f = m.get(r, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = m.get(r, c) - &f * m.get(k, c);
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place forward elimination with first-nonzero pivoting. Returns the
    /// rank. When `rhs` is given it receives the same row operations.
    fn row_echelon(&mut self, mut rhs: Option<&mut Vec<Rational>>) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(p, rank);
            if let Some(b) = rhs.as_deref_mut() {
                b.swap(p, rank);
            }
            let pivot = self.get(rank, col).clone();
            for r in rank + 1..self.rows {
                let f = self.get(r, col) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(r, c) - &f * self.get(rank, c);
                    self.set(r, c, v);
                }
                if let Some(b) = rhs.as_deref_mut() {
                    let v = &b[r] - &f * &b[rank];
                    b[r] = v;
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn rank(m: &RatMatrix) -> usize {
    m.rank()
}

pub fn solve_unique(m: &RatMatrix, v: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
    m.solve_unique(v)
}

pub fn is_negative_definite(m: &RatMatrix) -> Result<bool, LinAlgError> {
    m.is_negative_definite()
}

/// Gram matrix of a linear chain `[b_1, ..., b_l]`: diagonal `-b_i`, ones on
/// the first off-diagonals.
pub fn chain_gram(entries: &[u64]) -> RatMatrix {
    let n = entries.len();
    let mut m = RatMatrix::zeros(n, n);
    for (i, &b) in entries.iter().enumerate() {
        m.set(i, i, -Rational::from_integer(BigInt::from(b)));
        if i + 1 < n {
            m.set(i, i + 1, Rational::one());
            m.set(i + 1, i, Rational::one());
        }
    }
    m
}
