use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::{
    check_finite, check_tol, e_of, Result, SiegelPoint, ThetaConfig, ThetaError, ThetaValue,
};
use crate::linalg;

const EPS: f64 = f64::EPSILON;

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Sums a positive sequence given by its logarithm `log_term(i)`, i >= 0,
/// whose consecutive ratios are nonincreasing. Stops once the ratio drops
/// below one half and bounds the remainder geometrically.
fn log_sum_decreasing_ratio(log_term: impl Fn(u32) -> f64) -> f64 {
    let mut total = f64::NEG_INFINITY;
    let mut i = 0;
    loop {
        let cur = log_term(i);
        total = log_add(total, cur);
        let log_ratio = log_term(i + 1) - cur;
        if log_ratio < -LN_2 || cur == f64::NEG_INFINITY {
            let r = libm::exp(log_ratio);
            return log_add(total, cur + log_ratio - libm::log1p(-r));
        }
        i += 1;
    }
}

/// Centre of the Gaussian envelope of the terms and its logarithmic height.
struct Envelope {
    /// Integer box centre for the summation index `q`.
    center: Vec<i64>,
    /// `pi * n* Y n*`, the log of the largest possible term modulus.
    log_height: f64,
}

fn envelope(tau: &SiegelPoint, z: &[Complex64], m: &[f64]) -> Envelope {
    let g = tau.g();
    let im_z: Vec<f64> = z.iter().map(|v| v.im).collect();
    let sol = linalg::cholesky_solve(tau.cholesky(), g, &im_z);
    // n* = -Y^{-1} Im z; |term(n)| = exp(pi n*Yn* - pi (n-n*)Y(n-n*))
    let log_height = PI * sol.iter().zip(&im_z).map(|(a, b)| a * b).sum::<f64>();
    let center = sol
        .iter()
        .zip(m)
        .map(|(s, mi)| libm::round(-s - mi) as i64)
        .collect();
    Envelope { center, log_height }
}

/// Log of the bound on the omitted terms outside the sup-norm box of half-width `r`.
///
/// A term on the shell `|q - q0|_inf = s` has `|n - n*|_inf >= s - 1/2`, the
/// shell holds fewer than `(2s+1)^g` points, and the ratio of consecutive
/// shell bounds is nonincreasing.
fn log_box_tail(g: usize, lambda: f64, log_height: f64, r: u32) -> f64 {
    let gf = g as f64;
    let log_shell = |i: u32| {
        let s = f64::from(r) + 1.0 + f64::from(i);
        gf * libm::log(2.0 * s + 1.0) - PI * lambda * (s - 0.5) * (s - 0.5)
    };
    log_height + log_sum_decreasing_ratio(log_shell)
}

fn box_terms(g: usize, r: u32) -> u64 {
    let side = 2 * u64::from(r) + 1;
    side.checked_pow(g as u32).unwrap_or(u64::MAX)
}

fn validate(tau: &SiegelPoint, z: &[Complex64], m: &[f64], cfg: &ThetaConfig) -> Result<()> {
    let g = tau.g();
    for len in [z.len(), m.len()] {
        if len != g {
            return Err(ThetaError::DimensionMismatch {
                expected: g,
                found: len,
            });
        }
    }
    check_finite(z)?;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(ThetaError::NonFinite);
    }
    if tau.min_eigenvalue() < cfg.eigen_floor {
        return Err(ThetaError::EigenvalueBelowFloor {
            min: tau.min_eigenvalue(),
            floor: cfg.eigen_floor,
        });
    }
    Ok(())
}

/// `theta_{m,0}(tau, z) = sum_q e(1/2 (q+m) tau (q+m) + (q+m) z)` with a
/// certified tail `<= tol / 2`.
pub fn theta_g(
    tau: &SiegelPoint,
    z: &[Complex64],
    m: &[f64],
    tol: f64,
    cfg: &ThetaConfig,
) -> Result<ThetaValue> {
    check_tol(tol)?;
    validate(tau, z, m, cfg)?;
    let env = envelope(tau, z, m);
    let target = libm::log(tol / 2.0);
    let lambda = tau.min_eigenvalue();
    for r in 0..=cfg.max_radius {
        let log_tail = log_box_tail(tau.g(), lambda, env.log_height, r);
        if log_tail <= target {
            return sum_box(tau, z, m, &env, r, libm::exp(log_tail), cfg);
        }
    }
    Err(ThetaError::RadiusExceeded {
        tol,
        max_radius: cfg.max_radius,
    })
}

/// [`theta_g`] over a box of prescribed half-width; the reported tail is the
/// bound for that box, whatever its size.
pub fn theta_g_with_radius(
    tau: &SiegelPoint,
    z: &[Complex64],
    m: &[f64],
    radius: u32,
    cfg: &ThetaConfig,
) -> Result<ThetaValue> {
    validate(tau, z, m, cfg)?;
    let env = envelope(tau, z, m);
    let tail = libm::exp(log_box_tail(
        tau.g(),
        tau.min_eigenvalue(),
        env.log_height,
        radius,
    ));
    sum_box(tau, z, m, &env, radius, tail, cfg)
}

fn sum_box(
    tau: &SiegelPoint,
    z: &[Complex64],
    m: &[f64],
    env: &Envelope,
    r: u32,
    tail_bound: f64,
    cfg: &ThetaConfig,
) -> Result<ThetaValue> {
    let g = tau.g();
    let terms = box_terms(g, r);
    if terms > cfg.max_terms {
        return Err(ThetaError::TooManyTerms {
            terms,
            max_terms: cfg.max_terms,
        });
    }
    let ri = i64::from(r);
    let mut offset = vec![-ri; g];
    let mut n = vec![0.0; g];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut weighted = 0.0;
    loop {
        for i in 0..g {
            n[i] = (env.center[i] + offset[i]) as f64 + m[i];
        }
        let mut arg = Complex64::new(0.0, 0.0);
        let mut size = 0.0;
        for i in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            let mut row_size = 0.0;
            for j in 0..g {
                let t = tau.tau(i, j);
                row += t * n[j];
                row_size += t.norm() * libm::fabs(n[j]);
            }
            arg += (row * 0.5 + z[i]) * n[i];
            size += libm::fabs(n[i]) * (0.5 * row_size + z[i].norm());
        }
        let term = e_of(arg);
        let a = term.norm();
        sum += term;
        abs_sum += a;
        weighted += a * (2.0 * PI * size + 4.0);

        let mut k = 0;
        loop {
            if k == g {
                let rounding = EPS * (weighted + terms as f64 * abs_sum);
                return Ok(ThetaValue {
                    value: sum,
                    tail_bound,
                    radius: r,
                    rounding,
                });
            }
            if offset[k] < ri {
                offset[k] += 1;
                break;
            }
            offset[k] = -ri;
            k += 1;
        }
    }
}

/// Values, and optionally z-derivatives, of all `vartheta_k`, `k = 0..d`,
/// at one point, sharing a single summation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct VarthetaVector {
    pub values: Vec<Complex64>,
    /// Empty unless derivatives were requested.
    pub derivatives: Vec<Complex64>,
    /// Tail bound for each value.
    pub tail_bound: f64,
    /// Tail bound for each derivative (zero when not requested).
    pub derivative_tail_bound: f64,
    pub rounding: f64,
    pub derivative_rounding: f64,
    pub radius: u32,
}

impl VarthetaVector {
    pub fn value_error(&self) -> f64 {
        self.tail_bound + self.rounding
    }

    pub fn derivative_error(&self) -> f64 {
        self.derivative_tail_bound + self.derivative_rounding
    }
}

struct Envelope1 {
    n_star: f64,
    log_height: f64,
}

fn envelope1(tau_g: Complex64, z: Complex64) -> Envelope1 {
    let n_star = -z.im / tau_g.im;
    Envelope1 {
        n_star,
        log_height: PI * tau_g.im * n_star * n_star,
    }
}

/// Log bound for the omitted terms of one residue class outside
/// `|n - n*| <= r`, for the series itself (`deriv = false`) or for the
/// term-wise derivative.
fn log_line_tail(y: f64, env: &Envelope1, r: u32, deriv: bool) -> f64 {
    let a = libm::fabs(env.n_star);
    let log_term = |i: u32| {
        let x = f64::from(r) + f64::from(i);
        let w = if deriv {
            libm::log(2.0 * PI * (a + x + 1.0))
        } else {
            0.0
        };
        w - PI * y * x * x
    };
    // omitted points lie on both sides, at distances > r spaced by one
    env.log_height + LN_2 + log_sum_decreasing_ratio(log_term)
}

fn validate1(tau_g: Complex64, z: Complex64, d: u32, cfg: &ThetaConfig) -> Result<()> {
    if d == 0 {
        return Err(ThetaError::InvalidDegree);
    }
    check_finite(&[tau_g, z])?;
    if !(tau_g.im > 0.0) {
        return Err(ThetaError::NotInUpperHalfPlane(tau_g.im));
    }
    if tau_g.im < cfg.eigen_floor {
        return Err(ThetaError::EigenvalueBelowFloor {
            min: tau_g.im,
            floor: cfg.eigen_floor,
        });
    }
    Ok(())
}

/// All `vartheta_k(tau_g, z) = sum_q e(1/2 (q+k/d)^2 tau_g + (q+k/d) z)`
/// with certified tails `<= tol / 2`, plus derivatives if requested.
pub fn vartheta_vector(
    tau_g: Complex64,
    z: Complex64,
    d: u32,
    tol: f64,
    with_derivative: bool,
    cfg: &ThetaConfig,
) -> Result<VarthetaVector> {
    check_tol(tol)?;
    validate1(tau_g, z, d, cfg)?;
    let env = envelope1(tau_g, z);
    let target = libm::log(tol / 2.0);
    for r in 0..=cfg.max_radius {
        let value_ok = log_line_tail(tau_g.im, &env, r, false) <= target;
        let deriv_ok = !with_derivative || log_line_tail(tau_g.im, &env, r, true) <= target;
        if value_ok && deriv_ok {
            return sum_line(tau_g, z, d, &env, r, with_derivative, cfg);
        }
    }
    Err(ThetaError::RadiusExceeded {
        tol,
        max_radius: cfg.max_radius,
    })
}

/// [`vartheta_vector`] with a prescribed radius.
pub fn vartheta_vector_with_radius(
    tau_g: Complex64,
    z: Complex64,
    d: u32,
    radius: u32,
    with_derivative: bool,
    cfg: &ThetaConfig,
) -> Result<VarthetaVector> {
    validate1(tau_g, z, d, cfg)?;
    let env = envelope1(tau_g, z);
    sum_line(tau_g, z, d, &env, radius, with_derivative, cfg)
}

fn sum_line(
    tau_g: Complex64,
    z: Complex64,
    d: u32,
    env: &Envelope1,
    r: u32,
    with_derivative: bool,
    cfg: &ThetaConfig,
) -> Result<VarthetaVector> {
    let du = d as usize;
    let df = f64::from(d);
    let half_width = i64::from(r) * i64::from(d);
    let terms = (2 * half_width + 1) as u64;
    if terms > cfg.max_terms {
        return Err(ThetaError::TooManyTerms {
            terms,
            max_terms: cfg.max_terms,
        });
    }
    let jc = libm::round(df * env.n_star) as i64;
    let n_of = |j: i64| j as f64 / df;
    let arg = |j: i64| {
        let n = n_of(j);
        tau_g * (0.5 * n * n) + z * n
    };
    // term(j+1) / term(j) = e((2j+1)/(2d^2) tau + z/d); successive ratios
    // differ by the constant factor e(tau/d^2).
    let ratio_arg = |j: i64| tau_g * ((2 * j + 1) as f64 / (2.0 * df * df)) + z / df;
    let step = e_of(tau_g / (df * df));

    let mut values = vec![Complex64::new(0.0, 0.0); du];
    let mut derivs = vec![Complex64::new(0.0, 0.0); if with_derivative { du } else { 0 }];
    let mut abs_v = 0.0;
    let mut abs_d = 0.0;
    let mut weighted_v = 0.0;
    let mut weighted_d = 0.0;

    let base_arg = arg(jc);
    let base_err = 2.0 * PI * (base_arg.re.abs() + base_arg.im.abs()) + 4.0;
    let fwd_arg = ratio_arg(jc);
    let bwd_arg = -ratio_arg(jc - 1);
    let ratio_err = 2.0 * PI * (fwd_arg.norm() + bwd_arg.norm()) + 4.0;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);

    let mut add = |j: i64, term: Complex64, steps: f64| {
        let class = j.rem_euclid(i64::from(d)) as usize;
        let a = term.norm();
        let rel = base_err + steps * ratio_err + 2.0 * steps * steps;
        values[class] += term;
        abs_v += a;
        weighted_v += a * rel;
        if with_derivative {
            let n = n_of(j);
            derivs[class] += two_pi_i * n * term;
            let ad = a * 2.0 * PI * libm::fabs(n);
            abs_d += ad;
            weighted_d += ad * (rel + 2.0);
        }
    };

    let center = e_of(base_arg);
    add(jc, center, 0.0);
    let mut t = center;
    let mut ratio = e_of(fwd_arg);
    for s in 1..=half_width {
        t *= ratio;
        ratio *= step;
        add(jc + s, t, s as f64);
    }
    let mut t = center;
    let mut ratio = e_of(bwd_arg);
    for s in 1..=half_width {
        t *= ratio;
        ratio *= step;
        add(jc - s, t, s as f64);
    }

    let per_class = (2 * r + 1) as f64;
    let tail_bound = libm::exp(log_line_tail(tau_g.im, env, r, false));
    let derivative_tail_bound = if with_derivative {
        libm::exp(log_line_tail(tau_g.im, env, r, true))
    } else {
        0.0
    };
    Ok(VarthetaVector {
        values,
        derivatives: derivs,
        tail_bound,
        derivative_tail_bound,
        rounding: EPS * (weighted_v + per_class * abs_v),
        derivative_rounding: EPS * (weighted_d + per_class * abs_d),
        radius: r,
    })
}

/// `vartheta_k` (order 0) or its z-derivative (order 1), `k` reduced mod `d`.
pub fn vartheta(
    tau_g: Complex64,
    z: Complex64,
    k: i64,
    d: u32,
    tol: f64,
    deriv: u8,
    cfg: &ThetaConfig,
) -> Result<ThetaValue> {
    let all = vartheta_all(tau_g, z, d, tol, deriv, cfg)?;
    Ok(all[k.rem_euclid(i64::from(d.max(1))) as usize])
}

/// Every `vartheta_k`, `k = 0..d`, as separate [`ThetaValue`]s.
pub fn vartheta_all(
    tau_g: Complex64,
    z: Complex64,
    d: u32,
    tol: f64,
    deriv: u8,
    cfg: &ThetaConfig,
) -> Result<Vec<ThetaValue>> {
    let with_derivative = match deriv {
        0 => false,
        1 => true,
        _ => return Err(ThetaError::InvalidDerivativeOrder(deriv)),
    };
    let v = vartheta_vector(tau_g, z, d, tol, with_derivative, cfg)?;
    Ok(split(&v, with_derivative))
}

/// [`vartheta_all`] with a prescribed radius.
pub fn vartheta_all_with_radius(
    tau_g: Complex64,
    z: Complex64,
    d: u32,
    radius: u32,
    deriv: u8,
    cfg: &ThetaConfig,
) -> Result<Vec<ThetaValue>> {
    let with_derivative = match deriv {
        0 => false,
        1 => true,
        _ => return Err(ThetaError::InvalidDerivativeOrder(deriv)),
    };
    let v = vartheta_vector_with_radius(tau_g, z, d, radius, with_derivative, cfg)?;
    Ok(split(&v, with_derivative))
}

fn split(v: &VarthetaVector, deriv: bool) -> Vec<ThetaValue> {
    let (vals, tail, rounding) = if deriv {
        (
            &v.derivatives,
            v.derivative_tail_bound,
            v.derivative_rounding,
        )
    } else {
        (&v.values, v.tail_bound, v.rounding)
    };
    vals.iter()
        .map(|&value| ThetaValue {
            value,
            tail_bound: tail,
            radius: v.radius,
            rounding,
        })
        .collect()
}
