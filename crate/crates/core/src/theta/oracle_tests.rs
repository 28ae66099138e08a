//! Checks of the series against independent direct sums and the classical
//! functional equations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cfg() -> ThetaConfig {
    ThetaConfig::default()
}

/// Plain summation of `exp(2 pi i (n^2 tau / 2 + n z))` over `n = q + shift`,
/// `|q| <= 60`, using `Complex64::exp` directly.
fn naive_line(tau: Complex64, z: Complex64, shift: f64) -> Complex64 {
    let two_pi_i = c(0.0, 2.0 * PI);
    (-60..=60)
        .map(|q| {
            let n = q as f64 + shift;
            (two_pi_i * (tau * (0.5 * n * n) + z * n)).exp()
        })
        .sum()
}

#[test]
fn one_variable_constant() {
    let oracle = naive_line(c(0.0, 1.0), c(0.0, 0.0), 0.0);
    assert!((oracle.re - 1.086_434_811_213_308).abs() < 1e-14);
    let v = vartheta(c(0.0, 1.0), c(0.0, 0.0), 0, 1, 1e-14, 0, &cfg()).unwrap();
    assert!((v.value - oracle).norm() < 1e-14);
    assert!(v.tail_bound <= 0.5e-14);
}

#[test]
fn product_of_two_constants() {
    let tau = SiegelPoint::diagonal(1, &[c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
    let v = theta_g(&tau, &[c(0.0, 0.0); 2], &[0.0, 0.0], 1e-13, &cfg()).unwrap();
    let one = naive_line(c(0.0, 1.0), c(0.0, 0.0), 0.0);
    assert!((v.value - one * one).norm() < 1e-13);
    assert!((v.value.re - 1.180_340_599_016_096).abs() < 1e-12);
}

#[test]
fn vartheta_matches_direct_sum() {
    let tau = c(0.4, 1.1);
    let d = 5;
    for &z in &[c(0.3, 0.2), c(4.1, -0.9), c(-2.0, 1.4)] {
        let all = vartheta_all(tau, z, d, 1e-13, 0, &cfg()).unwrap();
        let der = vartheta_all(tau, z, d, 1e-13, 1, &cfg()).unwrap();
        for k in 0..d as usize {
            let shift = k as f64 / d as f64;
            let oracle = naive_line(tau, z, shift);
            assert!((all[k].value - oracle).norm() < 1e-12, "k={k}");
            // derivative oracle: central difference of the direct sum
            let h = 1e-5;
            let fd = (naive_line(tau, z + h, shift) - naive_line(tau, z - h, shift)) / (2.0 * h);
            assert!(
                (der[k].value - fd).norm() < 1e-6 * (1.0 + fd.norm()),
                "k={k}"
            );
        }
    }
}

#[test]
fn theta_k_reduces_to_vartheta_for_g1() {
    let tau = SiegelPoint::new(1, 4, vec![c(0.2, 0.9)]).unwrap();
    let z = [c(0.7, -0.3)];
    for k in 0..4 {
        let a = theta_k_section(&tau, &z, k, 1e-13, &cfg()).unwrap();
        let b = vartheta(c(0.2, 0.9), z[0], k, 4, 1e-13, 0, &cfg()).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
        let same = theta_k_section(&tau, &z, k + 4, 1e-13, &cfg()).unwrap();
        assert_eq!(a, same);
    }
}

#[test]
fn theta_k_on_diagonal_tau_factors() {
    // with tau diagonal, theta_k is theta_{0,0}(tau_1, z_1 - tau_1/2) * vartheta_k(tau_2, z_2)
    let tau = SiegelPoint::diagonal(3, &[c(0.1, 1.3), c(-0.2, 0.8)]).unwrap();
    let z = [c(0.25, 0.1), c(0.6, -0.2)];
    for k in 0..3 {
        let v = theta_k_section(&tau, &z, k, 1e-13, &cfg()).unwrap();
        let first = naive_line(c(0.1, 1.3), z[0] - c(0.1, 1.3) * 0.5, 0.0);
        let second = naive_line(c(-0.2, 0.8), z[1], k as f64 / 3.0);
        assert!((v.value - first * second).norm() < 1e-12);
    }
}

#[test]
fn automorphy_g1_matches_closed_form() {
    let tau_g = c(0.3, 1.2);
    let tau = SiegelPoint::new(1, 2, vec![tau_g]).unwrap();
    let z = [c(0.4, 0.1)];
    let a = automorphy_ratio(&tau, &z, 1, 1e-13, &cfg()).unwrap();
    let expected = e_of(-tau_g * 0.5 - z[0]);
    assert!((a.ratio - expected).norm() < 1e-11);
    assert!(a.spread < 1e-11);
    let p = automorphy_ratio(&tau, &z, 2, 1e-13, &cfg()).unwrap();
    assert!((p.ratio - c(1.0, 0.0)).norm() < 1e-11);
    assert_eq!(
        automorphy_ratio(&tau, &z, 3, 1e-13, &cfg()),
        Err(ThetaError::InvalidRow { row: 3, max: 2 })
    );
}

#[test]
fn automorphy_is_common_for_g2() {
    let tau = SiegelPoint::new(
        2,
        4,
        vec![c(0.1, 1.0), c(0.3, 0.2), c(0.3, 0.2), c(-0.2, 0.9)],
    )
    .unwrap();
    let z = [c(0.3, 0.1), c(1.7, -0.2)];
    for row in 1..=4 {
        let a = automorphy_ratio(&tau, &z, row, 1e-13, &cfg()).unwrap();
        assert!(a.spread < 1e-9, "row {row}: {}", a.spread);
        assert!(a.spread <= 10.0 * a.error_bound.max(1e-15), "row {row}");
        assert_eq!(a.sections_used, 4);
    }
}

#[test]
fn factorization_g2_instance() {
    let off = c(0.3, 0.1);
    let tau = SiegelPoint::new(2, 3, vec![c(0.0, 2.0), off, off, c(0.0, 1.0)]).unwrap();
    let z = [c(0.17, 0.05), c(0.61, -0.12)];
    let mut previous = f64::INFINITY;
    for q in 0..=6 {
        let r = factorization_residual(&tau, &z, 1, q, 1e-13, &cfg()).unwrap();
        assert!(r.residual <= previous + r.error_bound);
        previous = r.residual;
        if q == 6 {
            assert!(r.residual < 1e-8, "{}", r.residual);
        }
    }
    let g1 = SiegelPoint::new(1, 3, vec![c(0.1, 1.0)]).unwrap();
    let r = factorization_residual(&g1, &[c(0.2, 0.1)], 2, 0, 1e-13, &cfg()).unwrap();
    assert!(r.residual <= r.error_bound);
}

#[test]
fn eigenvalue_floor_is_enforced() {
    let tau = SiegelPoint::diagonal(1, &[c(0.0, 0.01)]).unwrap();
    assert!(matches!(
        theta_g(&tau, &[c(0.0, 0.0)], &[0.0], 1e-10, &cfg()),
        Err(ThetaError::EigenvalueBelowFloor { .. })
    ));
    assert!(matches!(
        vartheta(c(0.0, -1.0), c(0.0, 0.0), 0, 1, 1e-10, 0, &cfg()),
        Err(ThetaError::NotInUpperHalfPlane(_))
    ));
    let tight = ThetaConfig {
        max_radius: 1,
        ..cfg()
    };
    let tau = SiegelPoint::diagonal(1, &[c(0.0, 0.1)]).unwrap();
    assert!(matches!(
        theta_g(&tau, &[c(0.0, 0.0)], &[0.0], 1e-14, &tight),
        Err(ThetaError::RadiusExceeded { .. })
    ));
    assert!(matches!(
        vartheta(c(0.0, 1.0), c(0.0, 0.0), 0, 1, 1e-10, 2, &cfg()),
        Err(ThetaError::InvalidDerivativeOrder(2))
    ));
}

prop_compose! {
    /// Symmetric `tau` with `Im tau = A A^T + 0.5 I` (eigenvalues >= 0.5).
    fn siegel(max_g: usize)(g in 1..=max_g)(
        g in Just(g),
        re in proptest::collection::vec(-0.5f64..0.5, g * g),
        a in proptest::collection::vec(-0.6f64..0.6, g * g),
    ) -> SiegelPoint {
        let mut tau = vec![c(0.0, 0.0); g * g];
        for i in 0..g {
            for j in 0..g {
                let (lo, hi) = (i.min(j), i.max(j));
                let mut im: f64 = (0..g).map(|k| a[i * g + k] * a[j * g + k]).sum();
                if i == j {
                    im += 0.5;
                }
                tau[i * g + j] = c(re[lo * g + hi], im);
            }
        }
        SiegelPoint::new(g, 1, tau).unwrap()
    }
}

fn point(g: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -0.5f64..0.5), g)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tail_bound_covers_larger_box(
        (tau, z, m) in siegel(3).prop_flat_map(|t| {
            let g = t.g();
            (Just(t), point(g), proptest::collection::vec(0.0f64..1.0, g))
        })
    ) {
        let v = theta_g(&tau, &z, &m, 1e-10, &cfg()).unwrap();
        let wide = theta_g_with_radius(&tau, &z, &m, v.radius + 2, &cfg()).unwrap();
        prop_assert!((v.value - wide.value).norm() < v.tail_bound + v.rounding + wide.rounding);
        prop_assert!(v.tail_bound <= 1e-10);
    }

    #[test]
    fn evenness(
        (tau, z) in siegel(3).prop_flat_map(|t| { let g = t.g(); (Just(t), point(g)) })
    ) {
        let m = vec![0.0; tau.g()];
        let neg: Vec<_> = z.iter().map(|v| -v).collect();
        let a = theta_g(&tau, &z, &m, 1e-11, &cfg()).unwrap();
        let b = theta_g(&tau, &neg, &m, 1e-11, &cfg()).unwrap();
        prop_assert!((a.value - b.value).norm() <= 2.0 * a.tail_bound.max(b.tail_bound) + a.rounding + b.rounding);
    }

    #[test]
    fn vartheta_line_radius_property(
        re in -0.5f64..0.5, im in 0.5f64..2.0, zr in -3.0f64..3.0, zi in -0.6f64..0.6, d in 1u32..7
    ) {
        let tau = c(re, im);
        let z = c(zr, zi);
        for deriv in 0..2 {
            let v = vartheta_all(tau, z, d, 1e-10, deriv, &cfg()).unwrap();
            let w = vartheta_all_with_radius(tau, z, d, v[0].radius + 2, deriv, &cfg()).unwrap();
            for (a, b) in v.iter().zip(&w) {
                prop_assert!((a.value - b.value).norm() < a.tail_bound + a.rounding + b.rounding);
            }
        }
    }

    #[test]
    fn vartheta_quasi_periodicity(
        re in -0.5f64..0.5, im in 0.5f64..2.0, zr in -2.0f64..2.0, zi in -0.5f64..0.5, d in 1u32..7
    ) {
        let tau = c(re, im);
        let z = c(zr, zi);
        let base = vartheta_all(tau, z, d, 1e-13, 0, &cfg()).unwrap();
        let plus_one = vartheta_all(tau, z + 1.0, d, 1e-13, 0, &cfg()).unwrap();
        let plus_tau = vartheta_all(tau, z + tau, d, 1e-13, 0, &cfg()).unwrap();
        let plus_d = vartheta_all(tau, z + f64::from(d), d, 1e-13, 0, &cfg()).unwrap();
        let factor = e_of(-tau * 0.5 - z);
        for k in 0..d as usize {
            let b = base[k];
            let tol = 1e-11 * (1.0 + b.value.norm());
            let shift = e_of(c(k as f64 / f64::from(d), 0.0));
            prop_assert!((plus_one[k].value - shift * b.value).norm() < tol);
            prop_assert!((plus_tau[k].value - factor * b.value).norm() < tol * (1.0 + factor.norm()));
            prop_assert!((plus_d[k].value - b.value).norm() < tol);
        }
    }
}
