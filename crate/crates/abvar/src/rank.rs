//! Numerical rank of small complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RankError {
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("relative tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankVerdict {
    pub shape: (usize, usize),
    /// Nonincreasing singular values of the row-equilibrated matrix.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tol_rel: f64,
}

impl RankVerdict {
    /// The cutoff `tol_rel * sigma_max * max(shape)`.
    pub fn threshold(&self) -> f64 {
        let (m, n) = self.shape;
        self.tol_rel * self.singular_values.first().copied().unwrap_or(0.0) * m.max(n) as f64
    }

    /// Smallest retained singular value over the largest; zero when the rank is zero.
    pub fn retained_ratio(&self) -> f64 {
        match (self.rank, self.singular_values.first()) {
            (0, _) | (_, None) => 0.0,
            (r, Some(&top)) => self.singular_values[r - 1] / top,
        }
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.shape.0.min(self.shape.1)
    }
}

/// Rank of the matrix with the given rows: every nonzero row is scaled to
/// unit length, then singular values above
/// `tol_rel * sigma_max * max(rows, cols)` are counted.
///
/// Row scaling makes the verdict independent of the (arbitrary) projective
/// normalization of each row vector.
pub fn numerical_rank(rows: &[Vec<Complex64>], tol_rel: f64) -> Result<RankVerdict, RankError> {
    if !(tol_rel > 0.0) {
        return Err(RankError::InvalidTolerance(tol_rel));
    }
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(RankError::Ragged {
                row: i,
                expected: n,
                found: r.len(),
            });
        }
        if let Some(j) = r
            .iter()
            .position(|x| !x.re.is_finite() || !x.im.is_finite())
        {
            return Err(RankError::NonFinite { row: i, col: j });
        }
    }
    if m == 0 || n == 0 {
        return Ok(RankVerdict {
            shape: (m, n),
            singular_values: Vec::new(),
            rank: 0,
            tol_rel,
        });
    }
    let a = DMatrix::from_fn(m, n, |i, j| {
        let norm = rows[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            rows[i][j] / norm
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let cutoff = tol_rel * sv[0] * m.max(n) as f64;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    Ok(RankVerdict {
        shape: (m, n),
        singular_values: sv,
        rank,
        tol_rel,
    })
}
