use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::point::{ApPoint, Homogeneous};
use super::{DegenerationError, DegenerationModel, Result};
use crate::theta::{e_of, vartheta_vector};

/// `c_q = prod_{i<j<g} t_ij^{q_i q_j}` for `q` in `S = {0,1}^{g-1}`.
pub fn c_coefficient(model: &DegenerationModel, q: &[i64]) -> Result<Complex64> {
    let h = model.g() - 1;
    if q.len() != h || q.iter().any(|&x| x != 0 && x != 1) {
        return Err(DegenerationError::NotInS(q.to_vec()));
    }
    Ok(c_of_mask(model, mask_of(q)))
}

pub(crate) fn mask_of(q: &[i64]) -> u32 {
    q.iter()
        .enumerate()
        .fold(0, |m, (i, &x)| m | ((x as u32) << i))
}

pub(crate) fn bit(mask: u32, i: usize) -> bool {
    mask >> i & 1 == 1
}

pub(crate) fn c_of_mask(model: &DegenerationModel, q: u32) -> Complex64 {
    let h = model.g() - 1;
    let mut c = Complex64::new(1.0, 0.0);
    for i in 0..h {
        for j in i + 1..h {
            if bit(q, i) && bit(q, j) {
                c *= model.nome(i, j);
            }
        }
    }
    c
}

/// `z + q . tau''` for a mask `q`.
pub(crate) fn shifted_arg(model: &DegenerationModel, z: Complex64, q: u32) -> Complex64 {
    (0..model.g() - 1)
        .filter(|&i| bit(q, i))
        .fold(z, |acc, i| acc + model.tau_dprime(i))
}

/// Values of the `d` sections and a bound on their absolute error.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiValue {
    pub values: Vec<Complex64>,
    pub error: f64,
}

impl PhiValue {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v.norm_sqr()).sum::<f64>())
    }
}

/// `phi_k = sum_{q in S} c_q vartheta_k(tau_g, z + q tau'') prod_i u_i^{q_i} v_i^{1 - q_i}`,
/// the homogenized limit sections.
pub fn phi_homogeneous(
    model: &DegenerationModel,
    z: Complex64,
    coords: &[Homogeneous],
    tol: f64,
) -> Result<PhiValue> {
    let h = model.g() - 1;
    if coords.len() != h {
        return Err(DegenerationError::InvalidPoint(
            "wrong number of P^1 coordinates",
        ));
    }
    let d = model.d();
    let mut values = vec![Complex64::new(0.0, 0.0); d as usize];
    let mut error = 0.0;
    for q in 0..1u32 << h {
        let mut weight = c_of_mask(model, q);
        for (i, c) in coords.iter().enumerate() {
            weight *= if bit(q, i) { c.u } else { c.v };
        }
        if weight == Complex64::new(0.0, 0.0) {
            continue;
        }
        let v = vartheta_vector(
            model.tau_g(),
            shifted_arg(model, z, q),
            d,
            tol,
            false,
            model.theta_config(),
        )?;
        for (acc, x) in values.iter_mut().zip(&v.values) {
            *acc += weight * x;
        }
        error += weight.norm() * v.value_error();
    }
    Ok(PhiValue { values, error })
}

/// `phi(P)` in the homogeneous coordinates of `P`.
pub fn phi_sections(model: &DegenerationModel, p: &ApPoint, tol: f64) -> Result<PhiValue> {
    phi_homogeneous(model, p.z(), p.coords(), tol)
}

/// Canonical representative of `P`: every infinite coordinate `i` is moved
/// to zero by `(z; w) -> (z + tau_ig; ..., t_ij w_j, ..., 0, ...)`, then `z`
/// is reduced into the fundamental rectangle, the `tau_g`-translations
/// twisting the coordinates by `w_j -> e(-tau_jg) w_j`.
pub fn glue_normalize(model: &DegenerationModel, p: &ApPoint) -> Result<ApPoint> {
    let h = model.g() - 1;
    let mut z = p.z();
    let mut coords = p.coords().to_vec();
    for i in 0..h {
        if !coords[i].is_infinity() {
            continue;
        }
        coords[i] = Homogeneous::zero();
        z += model.tau_dprime(i);
        for j in (0..h).filter(|&j| j != i) {
            coords[j] = coords[j].scaled(model.nome(i, j))?;
        }
    }
    let (reduced, _, mu) = model.reduce_to_rectangle(z);
    if mu != 0 {
        for (j, c) in coords.iter_mut().enumerate() {
            *c = c.scaled(e_of(-model.tau_dprime(j) * mu as f64))?;
        }
    }
    ApPoint::new(reduced, coords)
}

/// `I(x) = {x + q a : q in S}` reduced into the fundamental rectangle, in
/// binary order of `q`; fails if two of them are closer than the separation floor.
pub fn translate_set_i(model: &DegenerationModel, x: Complex64) -> Result<Vec<Complex64>> {
    let h = model.g() - 1;
    let pts: Vec<Complex64> = (0..1u32 << h)
        .map(|q| model.reduce_to_rectangle(shifted_arg(model, x, q)).0)
        .collect();
    let floor = model.options().separation_floor;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if model.e_distance(pts[i], pts[j]) <= floor {
                return Err(DegenerationError::CoincidentTranslates(i, j));
            }
        }
    }
    Ok(pts)
}

/// Chordal Fubini-Study distance `sqrt(1 - |<a,b>|^2 / (|a|^2 |b|^2))`,
/// computed from the component of `b` orthogonal to `a`; `None` if either
/// vector vanishes or the lengths differ.
pub fn fs_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let scale = |v: &[Complex64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (sa, sb) = (scale(a), scale(b));
    if !(sa > 0.0 && sb > 0.0) || !sa.is_finite() || !sb.is_finite() {
        return None;
    }
    let a: Vec<Complex64> = a.iter().map(|x| x / sa).collect();
    let b: Vec<Complex64> = b.iter().map(|x| x / sb).collect();
    let aa: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let bb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    let ab: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    let coef = ab / aa;
    let residual: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (y - coef * x).norm_sqr())
        .sum();
    Some(libm::sqrt(residual / bb).min(1.0))
}
