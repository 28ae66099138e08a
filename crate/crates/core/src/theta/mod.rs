//! Riemann theta series with certified truncation.
//!
//! Every evaluation sums the series over a finite box chosen so that a
//! rigorous bound on the omitted terms stays below the requested tolerance.
//! The bound is reported with the value together with an estimate of the
//! floating-point rounding in the summation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg;

mod identities;
mod series;

pub use identities::{
    automorphy_ratio, factorization_residual, theta_k_section, AutomorphyRatio,
    FactorizationResidual,
};
pub use series::{
    theta_g, theta_g_with_radius, vartheta, vartheta_all, vartheta_all_with_radius,
    vartheta_vector, vartheta_vector_with_radius, VarthetaVector,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("period matrix is not symmetric (entry ({i}, {j}))")]
    NotSymmetric { i: usize, j: usize },
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Im tau = {0} is not positive")]
    NotInUpperHalfPlane(f64),
    #[error("polarization degree must be at least 1")]
    InvalidDegree,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("smallest eigenvalue {min} of Im tau is below the floor {floor}")]
    EigenvalueBelowFloor { min: f64, floor: f64 },
    #[error("tolerance {tol} not certified within radius {max_radius}")]
    RadiusExceeded { tol: f64, max_radius: u32 },
    #[error("summation box of {terms} terms exceeds the limit {max_terms}")]
    TooManyTerms { terms: u64, max_terms: u64 },
    #[error("lattice row {row} out of range 1..={max}")]
    InvalidRow { row: usize, max: usize },
    #[error("derivative order {0} is not supported (0 or 1)")]
    InvalidDerivativeOrder(u8),
    #[error("all sections vanish at the evaluation point")]
    AllSectionsVanish,
}

pub type Result<T> = core::result::Result<T, ThetaError>;

/// `e(z) = exp(2 pi i z)`, with the real part reduced mod 1 before the
/// trigonometric evaluation.
pub fn e_of(z: Complex64) -> Complex64 {
    let frac = z.re - libm::round(z.re);
    let mag = libm::exp(-2.0 * PI * z.im);
    let (s, c) = libm::sincos(2.0 * PI * frac);
    Complex64::new(mag * c, mag * s)
}

/// Limits shared by every series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaConfig {
    /// Evaluation is refused when the smallest eigenvalue of `Im tau` is below this.
    pub eigen_floor: f64,
    /// Largest box half-width tried before giving up.
    pub max_radius: u32,
    /// Largest number of summed terms.
    pub max_terms: u64,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        Self {
            eigen_floor: 0.05,
            max_radius: 64,
            max_terms: 20_000_000,
        }
    }
}

/// A truncated series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Rigorous bound on the modulus of the omitted terms.
    pub tail_bound: f64,
    /// Box half-width, in units of the summation lattice.
    pub radius: u32,
    /// First-order estimate of the floating-point error of the summation.
    pub rounding: f64,
}

impl ThetaValue {
    /// Tail bound plus rounding estimate.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding
    }
}

/// A point of the Siegel upper half space together with a polarization degree.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    g: usize,
    d: u32,
    tau: Vec<Complex64>,
    imag: Vec<f64>,
    chol: Vec<f64>,
    min_eigenvalue: f64,
}

impl SiegelPoint {
    /// `tau` is row-major `g * g`. Symmetry is checked to a few ulps and
    /// the stored matrix is symmetrized.
    pub fn new(g: usize, d: u32, tau: Vec<Complex64>) -> Result<Self> {
        if g == 0 {
            return Err(ThetaError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if tau.len() != g * g {
            return Err(ThetaError::DimensionMismatch {
                expected: g * g,
                found: tau.len(),
            });
        }
        if d == 0 {
            return Err(ThetaError::InvalidDegree);
        }
        if tau.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(ThetaError::NonFinite);
        }
        let mut tau = tau;
        for i in 0..g {
            for j in i + 1..g {
                let (a, b) = (tau[i * g + j], tau[j * g + i]);
                let scale = a.norm().max(b.norm()).max(1.0);
                if (a - b).norm() > 8.0 * f64::EPSILON * scale {
                    return Err(ThetaError::NotSymmetric { i, j });
                }
                let m = (a + b) * 0.5;
                tau[i * g + j] = m;
                tau[j * g + i] = m;
            }
        }
        let imag: Vec<f64> = tau.iter().map(|t| t.im).collect();
        let chol = linalg::cholesky(&imag, g).ok_or(ThetaError::NotPositiveDefinite)?;
        let min_eigenvalue = linalg::symmetric_eigenvalues(&imag, g)[0];
        if !(min_eigenvalue > 0.0) {
            return Err(ThetaError::NotPositiveDefinite);
        }
        Ok(Self {
            g,
            d,
            tau,
            imag,
            chol,
            min_eigenvalue,
        })
    }

    /// Diagonal period matrix.
    pub fn diagonal(d: u32, diag: &[Complex64]) -> Result<Self> {
        let g = diag.len();
        let mut tau = alloc::vec![Complex64::new(0.0, 0.0); g * g];
        for (i, &t) in diag.iter().enumerate() {
            tau[i * g + i] = t;
        }
        Self::new(g, d, tau)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn tau(&self, i: usize, j: usize) -> Complex64 {
        self.tau[i * self.g + j]
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.tau
    }

    pub fn imag(&self) -> &[f64] {
        &self.imag
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// The same period matrix with a different polarization degree.
    pub fn with_degree(&self, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(ThetaError::InvalidDegree);
        }
        Ok(Self { d, ..self.clone() })
    }

    pub(crate) fn cholesky(&self) -> &[f64] {
        &self.chol
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ThetaError::InvalidTolerance(tol))
    }
}

pub(crate) fn check_finite(z: &[Complex64]) -> Result<()> {
    if z.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(ThetaError::NonFinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn e_of_examples() {
        assert!((e_of(c(0.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e_of(c(0.5, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((e_of(c(0.0, 1.0)).re - 1.8674427317079888e-3).abs() < 1e-17);
        assert!((e_of(c(1e6 + 0.25, 0.0)) - c(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn siegel_validation() {
        let asym = vec![c(0.0, 1.0), c(0.1, 0.0), c(0.2, 0.0), c(0.0, 1.0)];
        assert_eq!(
            SiegelPoint::new(2, 1, asym),
            Err(ThetaError::NotSymmetric { i: 0, j: 1 })
        );
        let indefinite = vec![c(0.0, 1.0), c(0.0, 2.0), c(0.0, 2.0), c(0.0, 1.0)];
        assert_eq!(
            SiegelPoint::new(2, 1, indefinite),
            Err(ThetaError::NotPositiveDefinite)
        );
        assert_eq!(
            SiegelPoint::diagonal(0, &[c(0.0, 1.0)]),
            Err(ThetaError::InvalidDegree)
        );
        let p = SiegelPoint::diagonal(3, &[c(0.0, 2.0), c(0.1, 0.5)]).unwrap();
        assert!((p.min_eigenvalue() - 0.5).abs() < 1e-15);
        assert_eq!(p.with_degree(5).unwrap().d(), 5);
    }
}

#[cfg(test)]
mod oracle_tests;
