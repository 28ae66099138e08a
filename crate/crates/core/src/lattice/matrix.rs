use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use super::{LatticeError, Result};

/// Dense row-major integer matrix with checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LatticeError::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(LatticeError::LengthMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let p = a.checked_mul(rhs[(k, c)]).ok_or(LatticeError::Overflow)?;
                    out[(r, c)] = out[(r, c)].checked_add(p).ok_or(LatticeError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(LatticeError::LengthMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return Ok(0);
                };
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i * n + j]
                        .checked_mul(pivot)
                        .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or(LatticeError::Overflow)?;
                    a[i * n + j] = v / prev;
                }
            }
            prev = pivot;
        }
        i64::try_from(sign * a[n * n - 1]).map_err(|_| LatticeError::Overflow)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
