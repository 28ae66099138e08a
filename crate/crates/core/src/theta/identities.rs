use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::series::{theta_g, vartheta_vector};
use super::{check_finite, e_of, Result, SiegelPoint, ThetaConfig, ThetaError, ThetaValue};

fn reduce(k: i64, d: u32) -> i64 {
    k.rem_euclid(i64::from(d))
}

/// `theta_k(tau, z) = theta_{kr,0}(tau, z + s(tau))` with `r = (0, ..., 0, 1/d)`
/// and `s(tau) = (-tau_11/2, ..., -tau_{g-1,g-1}/2, 0)`.
pub fn theta_k_section(
    tau: &SiegelPoint,
    z: &[Complex64],
    k: i64,
    tol: f64,
    cfg: &ThetaConfig,
) -> Result<ThetaValue> {
    let g = tau.g();
    if z.len() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            found: z.len(),
        });
    }
    let mut m = vec![0.0; g];
    m[g - 1] = reduce(k, tau.d()) as f64 / f64::from(tau.d());
    let shifted: Vec<Complex64> = (0..g)
        .map(|i| {
            if i + 1 < g {
                z[i] - tau.tau(i, i) * 0.5
            } else {
                z[i]
            }
        })
        .collect();
    theta_g(tau, &shifted, &m, tol, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationResidual {
    /// `|theta_k - sum over the box|`.
    pub residual: f64,
    /// The directly evaluated `theta_k`.
    pub direct: ThetaValue,
    /// Bound on the truncation and rounding of both sides.
    pub error_bound: f64,
}

/// Compares `theta_k(tau, z)` with the regrouped sum
/// `sum_{|q|_inf <= Q} c_q vartheta_k(tau_g, z_g + q tau'') prod t_i^{q_i(q_i-1)/2} w_i^{q_i}`
/// over `q` in `Z^{g-1}`, where `t_i = e(tau_ii)`, `w_i = e(z_i)` and
/// `c_q = prod_{i<j<g} t_ij^{q_i q_j}`.
pub fn factorization_residual(
    tau: &SiegelPoint,
    z: &[Complex64],
    k: i64,
    q_max: u32,
    tol: f64,
    cfg: &ThetaConfig,
) -> Result<FactorizationResidual> {
    let g = tau.g();
    if z.len() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            found: z.len(),
        });
    }
    check_finite(z)?;
    let d = tau.d();
    let k = reduce(k, d) as usize;
    let direct = theta_k_section(tau, z, k as i64, tol, cfg)?;

    let h = g - 1;
    let tau_g = tau.tau(h, h);
    let t_diag: Vec<Complex64> = (0..h).map(|i| e_of(tau.tau(i, i))).collect();
    let w: Vec<Complex64> = (0..h).map(|i| e_of(z[i])).collect();
    let qm = i64::from(q_max);
    let mut q = vec![-qm; h];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    loop {
        let mut coef = Complex64::new(1.0, 0.0);
        for i in 0..h {
            for j in i + 1..h {
                coef *= e_of(tau.tau(i, j)).powi((q[i] * q[j]) as i32);
            }
            let twice = q[i] * (q[i] - 1);
            assert!(twice % 2 == 0, "t-exponent q(q-1)/2 must be an integer");
            coef *= t_diag[i].powi((twice / 2) as i32) * w[i].powi(q[i] as i32);
        }
        let mut arg = z[h];
        for (i, &qi) in q.iter().enumerate() {
            arg += tau.tau(i, h) * qi as f64;
        }
        let v = vartheta_vector(tau_g, arg, d, tol, false, cfg)?;
        sum += coef * v.values[k];
        err += coef.norm() * v.value_error();

        let mut i = 0;
        loop {
            if i == h {
                let residual = (direct.value - sum).norm();
                return Ok(FactorizationResidual {
                    residual,
                    direct,
                    error_bound: err + direct.error_bound(),
                });
            }
            if q[i] < qm {
                q[i] += 1;
                break;
            }
            q[i] = -qm;
            i += 1;
        }
    }
}

/// Result of comparing `theta_k(z + lambda) / theta_k(z)` across `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphyRatio {
    /// The ratio for the section of largest modulus at `z`.
    pub ratio: Complex64,
    /// Largest pairwise difference of the ratios, relative to `|ratio|`.
    pub spread: f64,
    /// Propagated error bound on `spread`, relative to `|ratio|`.
    pub error_bound: f64,
    /// Sections with a denominator safely away from zero.
    pub sections_used: usize,
}

/// Automorphy factor of the sections `theta_k` along one generator of the
/// period lattice: rows `1..=g` are the columns of `tau`, rows `g+1..=2g`
/// the standard basis vectors, the last one scaled by `d`.
pub fn automorphy_ratio(
    tau: &SiegelPoint,
    z: &[Complex64],
    row: usize,
    tol: f64,
    cfg: &ThetaConfig,
) -> Result<AutomorphyRatio> {
    let g = tau.g();
    if row == 0 || row > 2 * g {
        return Err(ThetaError::InvalidRow { row, max: 2 * g });
    }
    if z.len() != g {
        return Err(ThetaError::DimensionMismatch {
            expected: g,
            found: z.len(),
        });
    }
    let d = tau.d();
    let mut shifted = z.to_vec();
    if row <= g {
        for (i, s) in shifted.iter_mut().enumerate() {
            *s += tau.tau(i, row - 1);
        }
    } else {
        let j = row - g - 1;
        shifted[j] += if j + 1 == g { f64::from(d) } else { 1.0 };
    }
    let mut base = Vec::with_capacity(d as usize);
    let mut moved = Vec::with_capacity(d as usize);
    for k in 0..i64::from(d) {
        base.push(theta_k_section(tau, z, k, tol, cfg)?);
        moved.push(theta_k_section(tau, &shifted, k, tol, cfg)?);
    }
    let largest = base.iter().map(|v| v.value.norm()).fold(0.0, f64::max);
    let used: Vec<usize> = (0..d as usize)
        .filter(|&k| {
            let b = &base[k];
            b.value.norm() > 100.0 * b.error_bound() && b.value.norm() > 1e-10 * largest
        })
        .collect();
    if used.len() < 2.min(d as usize) {
        return Err(ThetaError::AllSectionsVanish);
    }
    let ratios: Vec<(Complex64, f64)> = used
        .iter()
        .map(|&k| {
            let (a, b) = (&moved[k], &base[k]);
            let r = a.value / b.value;
            let dr = (a.error_bound() + r.norm() * b.error_bound()) / b.value.norm();
            (r, dr)
        })
        .collect();
    let reference = used
        .iter()
        .zip(&ratios)
        .max_by(|x, y| base[*x.0].value.norm().total_cmp(&base[*y.0].value.norm()))
        .map(|(_, r)| r.0)
        .unwrap();
    let scale = reference.norm();
    let mut spread: f64 = 0.0;
    for (i, a) in ratios.iter().enumerate() {
        for b in &ratios[i + 1..] {
            spread = spread.max((a.0 - b.0).norm());
        }
    }
    let worst = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(AutomorphyRatio {
        ratio: reference,
        spread: spread / scale,
        error_bound: 2.0 * worst / scale,
        sections_used: used.len(),
    })
}
