//! The degenerate fiber `A_p`: a `(P^1)^{g-1}`-bundle over the elliptic
//! curve `E = C / (Z d + Z tau_g)` glued along its zero and infinity
//! sections, together with the limit sections `phi_k`.
//!
//! Coordinates `0..g-1` of an [`ApPoint`] are the `P^1` factors; the index
//! `g - 1` of a period-matrix entry refers to the elliptic direction.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::theta::{e_of, ThetaConfig, ThetaError};

mod limit;
mod point;
mod sections;
mod tangent;

pub use limit::{limit_consistency, limit_siegel_point, LimitReport};
pub use point::{ApPoint, Homogeneous};
pub use sections::{
    c_coefficient, fs_distance, glue_normalize, phi_homogeneous, phi_sections, translate_set_i,
    PhiValue,
};
pub use tangent::{tangent_family, theta_vector_family, FamilyMatrix, FamilyRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegenerationError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("tau'' fails the genericity certificate: relation {relation:?} lands within {distance:e} of the lattice")]
    NotGeneric { relation: Vec<i64>, distance: f64 },
    #[error("translate set has coincident points {0} and {1}")]
    CoincidentTranslates(usize, usize),
    #[error("vector {0:?} is not in {{0,1}}^(g-1)")]
    NotInS(Vec<i64>),
    #[error("invalid point: {0}")]
    InvalidPoint(&'static str),
}

pub type Result<T> = core::result::Result<T, DegenerationError>;

/// Settings fixed when a model is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    /// Coefficient bound of the integer-relation search.
    pub n_rel: u32,
    /// A relation closer than this to the lattice rejects the model.
    pub genericity_tol: f64,
    /// Smallest allowed distance between distinct points of `E`.
    pub separation_floor: f64,
    pub theta: ThetaConfig,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            n_rel: 8,
            genericity_tol: 1e-9,
            separation_floor: 1e-3,
            theta: ThetaConfig::default(),
        }
    }
}

/// Outcome of the bounded integer-relation search on `a_i = [tau_ig]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityCertificate {
    pub n_rel: u32,
    /// Smallest lattice distance of `sum n_i a_i` over the searched relations.
    pub min_distance: f64,
    /// A relation attaining it (empty when `g = 1`).
    pub closest_relation: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationModel {
    g: usize,
    d: u32,
    /// Symmetric `(g-1) x (g-1)` off-diagonal part of `tau'`, zero diagonal.
    tau_prime: Vec<Complex64>,
    tau_dprime: Vec<Complex64>,
    tau_g: Complex64,
    /// `e(tau_ij)` for `i, j < g - 1`, `i != j`; ones on the diagonal.
    nomes: Vec<Complex64>,
    options: ModelOptions,
    certificate: GenericityCertificate,
}

impl DegenerationModel {
    /// `tau_prime_offdiag` lists `tau_ij`, `i < j < g-1`, row by row;
    /// `tau_dprime` lists `tau_{i,g}` for `i < g-1`.
    pub fn new(
        g: usize,
        d: u32,
        tau_prime_offdiag: &[Complex64],
        tau_dprime: &[Complex64],
        tau_g: Complex64,
        options: ModelOptions,
    ) -> Result<Self> {
        if g == 0 {
            return Err(DegenerationError::InvalidModel("g must be at least 1"));
        }
        if d == 0 {
            return Err(DegenerationError::InvalidModel("d must be at least 1"));
        }
        let h = g - 1;
        if tau_prime_offdiag.len() != h * h.saturating_sub(1) / 2 {
            return Err(DegenerationError::InvalidModel(
                "wrong number of tau' entries",
            ));
        }
        if tau_dprime.len() != h {
            return Err(DegenerationError::InvalidModel(
                "wrong number of tau'' entries",
            ));
        }
        let all = tau_prime_offdiag
            .iter()
            .chain(tau_dprime)
            .chain(core::iter::once(&tau_g));
        if all.clone().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(DegenerationError::InvalidModel("non-finite period entry"));
        }
        if !(tau_g.im > 0.0) {
            return Err(DegenerationError::InvalidModel("Im tau_g must be positive"));
        }
        if !(options.genericity_tol > 0.0 && options.separation_floor > 0.0) {
            return Err(DegenerationError::InvalidModel(
                "tolerances must be positive",
            ));
        }
        let mut tau_prime = vec![Complex64::new(0.0, 0.0); h * h];
        let mut it = tau_prime_offdiag.iter();
        for i in 0..h {
            for j in i + 1..h {
                let t = *it.next().unwrap();
                tau_prime[i * h + j] = t;
                tau_prime[j * h + i] = t;
            }
        }
        let nomes = (0..h * h)
            .map(|k| {
                if k / h == k % h {
                    Complex64::new(1.0, 0.0)
                } else {
                    e_of(tau_prime[k])
                }
            })
            .collect();
        let mut model = Self {
            g,
            d,
            tau_prime,
            tau_dprime: tau_dprime.to_vec(),
            tau_g,
            nomes,
            options,
            certificate: GenericityCertificate {
                n_rel: options.n_rel,
                min_distance: f64::INFINITY,
                closest_relation: Vec::new(),
            },
        };
        model.certificate = model.certify()?;
        Ok(model)
    }

    fn certify(&self) -> Result<GenericityCertificate> {
        let h = self.g - 1;
        let n = i64::from(self.options.n_rel);
        let mut best = GenericityCertificate {
            n_rel: self.options.n_rel,
            min_distance: f64::INFINITY,
            closest_relation: Vec::new(),
        };
        if h == 0 || n == 0 {
            return Ok(best);
        }
        let mut rel = vec![-n; h];
        loop {
            if rel.iter().any(|&x| x != 0) {
                let x: Complex64 = rel
                    .iter()
                    .zip(&self.tau_dprime)
                    .map(|(&c, &t)| t * c as f64)
                    .sum();
                let dist = self.lattice_distance(x);
                if dist < best.min_distance {
                    best.min_distance = dist;
                    best.closest_relation = rel.clone();
                }
            }
            let mut i = 0;
            while i < h && rel[i] == n {
                rel[i] = -n;
                i += 1;
            }
            if i == h {
                break;
            }
            rel[i] += 1;
        }
        if best.min_distance <= self.options.genericity_tol {
            return Err(DegenerationError::NotGeneric {
                relation: best.closest_relation,
                distance: best.min_distance,
            });
        }
        Ok(best)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn tau_g(&self) -> Complex64 {
        self.tau_g
    }

    /// `tau_{i,g}` for `i < g - 1`.
    pub fn tau_dprime(&self, i: usize) -> Complex64 {
        self.tau_dprime[i]
    }

    pub fn tau_dprime_all(&self) -> &[Complex64] {
        &self.tau_dprime
    }

    /// Off-diagonal `tau_ij`, `i, j < g - 1`; zero when `i == j`.
    pub fn tau_prime(&self, i: usize, j: usize) -> Complex64 {
        self.tau_prime[i * (self.g - 1) + j]
    }

    /// `t_ij = e(tau_ij)` for `i != j < g - 1`, and 1 when `i == j`.
    pub fn nome(&self, i: usize, j: usize) -> Complex64 {
        self.nomes[i * (self.g - 1) + j]
    }

    /// `t_{i,g} = e(tau_{i,g} / d)`.
    pub fn nome_g(&self, i: usize) -> Complex64 {
        e_of(self.tau_dprime[i] / f64::from(self.d))
    }

    pub fn options(&self) -> &ModelOptions {
        &self.options
    }

    pub fn theta_config(&self) -> &ThetaConfig {
        &self.options.theta
    }

    pub fn certificate(&self) -> &GenericityCertificate {
        &self.certificate
    }

    /// Writes `x = s d + u tau_g` and returns `(s, u)`.
    pub fn lattice_coordinates(&self, x: Complex64) -> (f64, f64) {
        let u = x.im / self.tau_g.im;
        let s = (x.re - u * self.tau_g.re) / f64::from(self.d);
        (s, u)
    }

    /// Representative of `[x]` in `{s d + u tau_g : s, u in [0, 1)}` and the
    /// integers `(m_s, m_u)` with `x = reduced + m_s d + m_u tau_g`.
    pub fn reduce_to_rectangle(&self, x: Complex64) -> (Complex64, i64, i64) {
        let (_, u) = self.lattice_coordinates(x);
        // A small slack keeps the reduction idempotent under rounding.
        let mu = libm::floor(u + 1e-12);
        let x1 = x - self.tau_g * mu;
        let (s1, _) = self.lattice_coordinates(x1);
        let ms = libm::floor(s1 + 1e-12);
        (x1 - f64::from(self.d) * ms, ms as i64, mu as i64)
    }

    /// Distance from `x` to the nearest point of `Z d + Z tau_g`.
    pub fn lattice_distance(&self, x: Complex64) -> f64 {
        let (s, u) = self.lattice_coordinates(x);
        let (s0, u0) = (libm::floor(s), libm::floor(u));
        let mut best = f64::INFINITY;
        for a in -1..=2 {
            for b in -1..=2 {
                let p = (s0 + f64::from(a)) * f64::from(self.d) + self.tau_g * (u0 + f64::from(b));
                best = best.min((x - p).norm());
            }
        }
        best
    }

    /// Distance between the classes of `x` and `y` in `E`.
    pub fn e_distance(&self, x: Complex64, y: Complex64) -> f64 {
        self.lattice_distance(x - y)
    }
}

#[cfg(test)]
mod tests;
