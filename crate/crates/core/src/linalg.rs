//! Small dense matrices, Gaussian elimination with partial pivoting, and rank.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot is treated as zero when
/// `|pivot| < PIVOT_TOLERANCE * max|A|`.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::MatrixShape {
                rows,
                cols,
                what: "data length differs from rows * cols",
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::MatrixShape {
                rows: r,
                cols: c,
                what: "ragged rows",
            });
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Appends `column` on the right.
    pub fn augment(&self, column: &[f64]) -> Result<Self> {
        if column.len() != self.rows {
            return Err(Error::MatrixShape {
                rows: self.rows,
                cols: self.cols,
                what: "augmenting column has the wrong length",
            });
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for (i, &c) in column.iter().enumerate() {
            data.extend_from_slice(self.row(i));
            data.push(c);
        }
        Self::new(self.rows, self.cols + 1, data)
    }
}

/// Row echelon rank. Pivots smaller than `threshold` in absolute value count
/// as zero.
pub fn rank(m: &Matrix, threshold: f64) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let (pivot_row, pivot) = (rank..a.rows)
            .map(|r| (r, a.get(r, col).abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot < threshold || pivot == 0.0 {
            continue;
        }
        swap_rows(&mut a, rank, pivot_row);
        for r in rank + 1..a.rows {
            let factor = a.get(r, col) / a.get(rank, col);
            if factor != 0.0 {
                for c in col..a.cols {
                    let v = a.get(r, c) - factor * a.get(rank, c);
                    a.set(r, c, v);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when a pivot falls below
/// `PIVOT_TOLERANCE * max|a|`; the error reports whether `rhs` lies in the
/// column space (infinitely many solutions) or not (none).
pub fn solve(a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::MatrixShape {
            rows: a.rows,
            cols: a.cols,
            what: "solve needs a square matrix",
        });
    }
    let n = a.rows;
    if rhs.len() != n {
        return Err(Error::MatrixShape {
            rows: a.rows,
            cols: a.cols,
            what: "right-hand side has the wrong length",
        });
    }
    let threshold = PIVOT_TOLERANCE * a.max_abs();
    let mut m = a.augment(rhs)?;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            return Err(singular(a, rhs, threshold));
        }
        swap_rows(&mut m, col, pivot_row);
        for r in col + 1..n {
            let factor = m.get(r, col) / m.get(col, col);
            if factor != 0.0 {
                for c in col..=n {
                    let v = m.get(r, c) - factor * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m.get(i, n);
        for j in i + 1..n {
            acc -= m.get(i, j) * x[j];
        }
        x[i] = acc / m.get(i, i);
    }
    Ok(x)
}

fn singular(a: &Matrix, rhs: &[f64], threshold: f64) -> Error {
    let r = rank(a, threshold);
    let augmented = a.augment(rhs).map(|m| rank(&m, threshold)).unwrap_or(r + 1);
    Error::SingularMatrix {
        rank: r,
        rank_consistent: r == augmented,
    }
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols {
        m.data.swap(a * m.cols + c, b * m.cols + c);
    }
}
