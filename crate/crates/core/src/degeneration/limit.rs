use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::point::Homogeneous;
use super::sections::phi_homogeneous;
use super::{DegenerationModel, Result};
use crate::theta::{e_of, theta_k_section, SiegelPoint};

/// The full period matrix whose diagonal entries `tau_ii`, `i < g - 1`, are
/// purely imaginary with `|e(tau_ii)| = t_scale`; the remaining entries
/// come from the model.
pub fn limit_siegel_point(model: &DegenerationModel, t_scale: f64) -> Result<SiegelPoint> {
    if !(t_scale > 0.0 && t_scale < 1.0) {
        return Err(super::DegenerationError::InvalidModel(
            "t_scale must lie in (0, 1)",
        ));
    }
    let g = model.g();
    let h = g - 1;
    let diag = Complex64::new(0.0, -libm::log(t_scale) / (2.0 * PI));
    let mut tau = vec![Complex64::new(0.0, 0.0); g * g];
    for i in 0..g {
        for j in 0..g {
            tau[i * g + j] = match (i < h, j < h) {
                (true, true) if i == j => diag,
                (true, true) => model.tau_prime(i, j),
                (true, false) => model.tau_dprime(i),
                (false, true) => model.tau_dprime(j),
                (false, false) => model.tau_g(),
            };
        }
    }
    Ok(SiegelPoint::new(g, model.d(), tau)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub t_scale: f64,
    pub samples: usize,
    /// `max |theta_k(tau, z) - phi_k(z_g; e(z_1), ..., e(z_{g-1}))|`.
    pub max_deviation: f64,
    /// Largest evaluation error bound among the compared values.
    pub error_bound: f64,
    /// Sample attaining the maximum.
    pub worst_sample: usize,
}

fn kronecker(n: usize, dim: usize) -> f64 {
    const IRRATIONALS: [f64; 4] = [
        0.414_213_562_373_095_1, // sqrt 2
        0.732_050_807_568_877_2, // sqrt 3
        0.236_067_977_499_789_7, // sqrt 5
        0.645_751_311_064_590_6, // sqrt 7
    ];
    let a = IRRATIONALS[dim % IRRATIONALS.len()] + (dim / IRRATIONALS.len()) as f64 * 0.1;
    let x = (n as f64 + 0.5) * a;
    x - libm::floor(x)
}

/// Compares the sections `theta_k` of the full period matrix at
/// `t_i = t_scale` with the limit sections `phi_k`, over `samples`
/// deterministic points with real `z_1, ..., z_{g-1}` (so `|w_i| = 1`)
/// and `z_g` in the fundamental rectangle.
pub fn limit_consistency(
    model: &DegenerationModel,
    t_scale: f64,
    samples: usize,
    tol: f64,
) -> Result<LimitReport> {
    let tau = limit_siegel_point(model, t_scale)?;
    let g = model.g();
    let h = g - 1;
    let cfg = model.theta_config();
    let mut report = LimitReport {
        t_scale,
        samples,
        max_deviation: 0.0,
        error_bound: 0.0,
        worst_sample: 0,
    };
    for n in 0..samples {
        let mut z: Vec<Complex64> = (0..h)
            .map(|i| Complex64::new(kronecker(n, i), 0.0))
            .collect();
        let (s, u) = (kronecker(n, h), kronecker(n, h + 1));
        let zg = model.tau_g() * u + f64::from(model.d()) * s;
        z.push(zg);
        let coords: Vec<Homogeneous> = z[..h]
            .iter()
            .map(|&zi| Homogeneous {
                u: e_of(zi),
                v: Complex64::new(1.0, 0.0),
            })
            .collect();
        let phi = phi_homogeneous(model, zg, &coords, tol)?;
        for (k, &p) in phi.values.iter().enumerate() {
            let t = theta_k_section(&tau, &z, k as i64, tol, cfg)?;
            let dev = (t.value - p).norm();
            report.error_bound = report.error_bound.max(t.error_bound() + phi.error);
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.worst_sample = n;
            }
        }
    }
    Ok(report)
}
