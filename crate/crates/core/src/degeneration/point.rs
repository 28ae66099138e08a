use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DegenerationError, Result};

/// Homogeneous coordinates `(u : v)` on one `P^1` factor, stored scaled so
/// that the larger of `|u|`, `|v|` is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homogeneous {
    pub u: Complex64,
    pub v: Complex64,
}

impl Homogeneous {
    pub fn new(u: Complex64, v: Complex64) -> Result<Self> {
        let finite = u.re.is_finite() && u.im.is_finite() && v.re.is_finite() && v.im.is_finite();
        if !finite {
            return Err(DegenerationError::InvalidPoint(
                "non-finite homogeneous coordinate",
            ));
        }
        if u.norm() >= v.norm() {
            if u.norm() == 0.0 {
                return Err(DegenerationError::InvalidPoint(
                    "(0:0) is not a point of P^1",
                ));
            }
            Ok(Self {
                u: Complex64::new(1.0, 0.0),
                v: v / u,
            })
        } else {
            Ok(Self {
                u: u / v,
                v: Complex64::new(1.0, 0.0),
            })
        }
    }

    /// The affine value `w`.
    pub fn affine(w: Complex64) -> Result<Self> {
        Self::new(w, Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self {
            u: Complex64::new(0.0, 0.0),
            v: Complex64::new(1.0, 0.0),
        }
    }

    pub fn infinity() -> Self {
        Self {
            u: Complex64::new(1.0, 0.0),
            v: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u == Complex64::new(0.0, 0.0)
    }

    pub fn is_infinity(&self) -> bool {
        self.v == Complex64::new(0.0, 0.0)
    }

    /// `u / v`, infinite at `(1 : 0)`.
    pub fn value(&self) -> Complex64 {
        self.u / self.v
    }

    /// `(c u : v)`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.u * c, self.v)
    }
}

/// A point `rho(z_g; w_1, ..., w_{g-1})` of the degenerate fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct ApPoint {
    z: Complex64,
    coords: Vec<Homogeneous>,
    stratum: usize,
    /// Coordinate indices, the `h` zero-or-infinity slots first.
    permutation: Vec<usize>,
}

impl ApPoint {
    pub fn new(z: Complex64, coords: Vec<Homogeneous>) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(DegenerationError::InvalidPoint("non-finite z"));
        }
        let coords = coords
            .into_iter()
            .map(|c| Homogeneous::new(c.u, c.v))
            .collect::<Result<Vec<_>>>()?;
        let special = |c: &Homogeneous| c.is_zero() || c.is_infinity();
        let mut permutation: Vec<usize> =
            (0..coords.len()).filter(|&i| special(&coords[i])).collect();
        let stratum = permutation.len();
        permutation.extend((0..coords.len()).filter(|&i| !special(&coords[i])));
        Ok(Self {
            z,
            coords,
            stratum,
            permutation,
        })
    }

    /// A point with affine coordinates `w_i`.
    pub fn affine(z: Complex64, w: &[Complex64]) -> Result<Self> {
        Self::new(
            z,
            w.iter()
                .map(|&x| Homogeneous::affine(x))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn coords(&self) -> &[Homogeneous] {
        &self.coords
    }

    /// Number of coordinates equal to 0 or infinity.
    pub fn stratum(&self) -> usize {
        self.stratum
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Coordinates equal to 0 or infinity.
    pub fn special(&self) -> &[usize] {
        &self.permutation[..self.stratum]
    }

    /// Coordinates in `P^1 - {0, infinity}`.
    pub fn finite(&self) -> &[usize] {
        &self.permutation[self.stratum..]
    }

    /// Recomputes the stratum and compares it with the stored value.
    pub fn is_consistent(&self) -> bool {
        let count = self
            .coords
            .iter()
            .filter(|c| c.is_zero() || c.is_infinity())
            .count();
        count == self.stratum
            && self.coords.iter().all(|c| {
                let m = c.u.norm().max(c.v.norm());
                (m - 1.0).abs() < 1e-15
            })
    }
}
