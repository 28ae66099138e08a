use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::theta::{vartheta_vector, ThetaConfig};

const TOL: f64 = 1e-13;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn model(g: usize, d: u32) -> DegenerationModel {
    let tau_g = c(0.4, 1.1);
    match g {
        1 => DegenerationModel::new(1, d, &[], &[], tau_g, ModelOptions::default()),
        2 => DegenerationModel::new(2, d, &[], &[c(0.21, 0.38)], tau_g, ModelOptions::default()),
        3 => DegenerationModel::new(
            3,
            d,
            &[c(0.31, 0.27)],
            &[c(0.21, 0.38), c(0.13, 0.59)],
            tau_g,
            ModelOptions::default(),
        ),
        4 => DegenerationModel::new(
            4,
            d,
            &[c(0.31, 0.27), c(0.11, 0.23), c(-0.17, 0.31)],
            &[c(0.21, 0.38), c(0.13, 0.59), c(0.37, 0.17)],
            tau_g,
            ModelOptions::default(),
        ),
        _ => unreachable!(),
    }
    .unwrap()
}

fn theta_line(m: &DegenerationModel, z: Complex64) -> Vec<Complex64> {
    vartheta_vector(m.tau_g(), z, m.d(), TOL, false, &ThetaConfig::default())
        .unwrap()
        .values
}

fn fs(a: &[Complex64], b: &[Complex64]) -> f64 {
    fs_distance(a, b).unwrap()
}

/// Relative distance from `v` to the span of `rows`, by two passes of
/// modified Gram-Schmidt.
fn span_residual(rows: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for r in rows {
        let mut x = r.clone();
        for _ in 0..2 {
            for b in &basis {
                let p: Complex64 = b.iter().zip(&x).map(|(bi, xi)| bi.conj() * xi).sum();
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= p * bi;
                }
            }
        }
        let n = x.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            basis.push(x.iter().map(|t| t / n).collect());
        }
    }
    let mut x = v.to_vec();
    for _ in 0..2 {
        for b in &basis {
            let p: Complex64 = b.iter().zip(&x).map(|(bi, xi)| bi.conj() * xi).sum();
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= p * bi;
            }
        }
    }
    let nv = v.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    x.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt() / nv
}

#[test]
fn c_coefficient_examples() {
    let m2 = model(2, 3);
    assert_eq!(c_coefficient(&m2, &[1]).unwrap(), c(1.0, 0.0));
    assert_eq!(c_coefficient(&m2, &[0]).unwrap(), c(1.0, 0.0));
    let m3 = model(3, 5);
    assert_eq!(c_coefficient(&m3, &[1, 1]).unwrap(), m3.nome(0, 1));
    assert_eq!(c_coefficient(&m3, &[1, 0]).unwrap(), c(1.0, 0.0));
    let m4 = model(4, 9);
    let want = m4.nome(0, 1) * m4.nome(0, 2) * m4.nome(1, 2);
    assert!((c_coefficient(&m4, &[1, 1, 1]).unwrap() - want).norm() < 1e-15);
    assert!(matches!(
        c_coefficient(&m3, &[2, 0]),
        Err(DegenerationError::NotInS(_))
    ));
    assert!(matches!(
        c_coefficient(&m3, &[1]),
        Err(DegenerationError::NotInS(_))
    ));
}

#[test]
fn c_is_multiplicative() {
    let m = model(4, 9);
    for q in 0..8u32 {
        let qv: Vec<i64> = (0..3).map(|i| i64::from(q >> i & 1)).collect();
        for i in 0..3 {
            if qv[i] == 1 {
                continue;
            }
            let mut up = qv.clone();
            up[i] = 1;
            let mut factor = c(1.0, 0.0);
            for j in (0..3).filter(|&j| j != i && qv[j] == 1) {
                factor *= m.nome(i, j);
            }
            let lhs = c_coefficient(&m, &up).unwrap();
            let rhs = c_coefficient(&m, &qv).unwrap() * factor;
            assert!((lhs - rhs).norm() <= 4.0 * f64::EPSILON * lhs.norm());
        }
    }
}

#[test]
fn genericity_certificate() {
    let m = model(3, 8);
    assert!(m.certificate().min_distance > 1e-9);
    assert_eq!(m.certificate().closest_relation.len(), 2);
    // 3 * 1 = 3 = d is a lattice point
    let bad = DegenerationModel::new(
        2,
        3,
        &[],
        &[c(1.0, 0.0)],
        c(0.4, 1.1),
        ModelOptions::default(),
    );
    assert!(matches!(bad, Err(DegenerationError::NotGeneric { .. })));
    // 2 * tau_g / 2 = tau_g
    let bad = DegenerationModel::new(
        2,
        5,
        &[],
        &[c(0.2, 0.55)],
        c(0.4, 1.1),
        ModelOptions::default(),
    );
    assert!(matches!(bad, Err(DegenerationError::NotGeneric { .. })));
    assert!(DegenerationModel::new(
        2,
        5,
        &[],
        &[c(0.2, 0.55)],
        c(0.4, -1.1),
        ModelOptions::default()
    )
    .is_err());
}

#[test]
fn phi_small_cases() {
    let m1 = model(1, 4);
    let z = c(0.7, 0.3);
    let p = ApPoint::affine(z, &[]).unwrap();
    let phi = phi_sections(&m1, &p, TOL).unwrap();
    let oracle = theta_line(&m1, z);
    for (a, b) in phi.values.iter().zip(&oracle) {
        assert!((a - b).norm() < 1e-12);
    }

    let m2 = model(2, 5);
    let w = c(0.3, -0.2);
    let raw = phi_homogeneous(
        &m2,
        z,
        &[Homogeneous {
            u: w,
            v: c(1.0, 0.0),
        }],
        TOL,
    )
    .unwrap();
    let a = theta_line(&m2, z);
    let b = theta_line(&m2, z + m2.tau_dprime(0));
    for k in 0..5 {
        assert!((raw.values[k] - (a[k] + b[k] * w)).norm() < 1e-12);
    }
    let at_zero = phi_sections(&m2, &ApPoint::affine(z, &[c(0.0, 0.0)]).unwrap(), TOL).unwrap();
    assert!(fs(&at_zero.values, &a) < 1e-14);
}

#[test]
fn phi_is_multilinear() {
    let m = model(3, 9);
    let z = c(1.3, 0.4);
    let eval = |w0: Complex64, w1: Complex64| {
        let coords = [
            Homogeneous {
                u: w0,
                v: c(1.0, 0.0),
            },
            Homogeneous {
                u: w1,
                v: c(1.0, 0.0),
            },
        ];
        phi_homogeneous(&m, z, &coords, TOL).unwrap().values
    };
    let (w0, w1, h) = (c(0.2, 0.1), c(-0.4, 0.3), c(0.05, 0.02));
    for slot in 0..2 {
        let at = |s: f64| {
            let dw = h * s;
            if slot == 0 {
                eval(w0 + dw, w1)
            } else {
                eval(w0, w1 + dw)
            }
        };
        let (a, b, cc) = (at(-1.0), at(0.0), at(1.0));
        let scale = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for k in 0..9 {
            assert!((a[k] - 2.0 * b[k] + cc[k]).norm() < 1e-9 * scale);
        }
    }
}

#[test]
fn phi_has_period_d_in_z() {
    let m = model(3, 8);
    let p = ApPoint::affine(c(0.6, 0.2), &[c(0.5, 0.1), c(-0.3, 0.7)]).unwrap();
    let q = ApPoint::affine(c(8.6, 0.2), &[c(0.5, 0.1), c(-0.3, 0.7)]).unwrap();
    let (a, b) = (
        phi_sections(&m, &p, TOL).unwrap(),
        phi_sections(&m, &q, TOL).unwrap(),
    );
    for k in 0..8 {
        assert!((a.values[k] - b.values[k]).norm() < 1e-11);
    }
}

#[test]
fn glue_examples() {
    let m = model(2, 5);
    let p = ApPoint::affine(c(1.2, 0.3), &[c(0.4, 0.2)]).unwrap();
    assert_eq!(glue_normalize(&m, &p).unwrap(), p);

    let z = c(1.2, 0.3);
    let inf = ApPoint::new(z, vec![Homogeneous::infinity()]).unwrap();
    let glued = glue_normalize(&m, &inf).unwrap();
    assert!(glued.coords()[0].is_zero());
    assert_eq!(glued.stratum(), 1);
    assert!(m.e_distance(glued.z(), z + m.tau_dprime(0)) < 1e-14);
    let (a, b) = (
        phi_sections(&m, &inf, TOL).unwrap(),
        phi_sections(&m, &glued, TOL).unwrap(),
    );
    assert!(fs(&a.values, &b.values) < 1e-9);
    assert_eq!(glue_normalize(&m, &glued).unwrap(), glued);
}

#[test]
fn glue_handles_several_infinities_and_twists() {
    let m = model(3, 9);
    let p = ApPoint::new(
        c(-3.7, 2.9),
        vec![
            Homogeneous::infinity(),
            Homogeneous::affine(c(1.7, -2.2)).unwrap(),
        ],
    )
    .unwrap();
    let g1 = glue_normalize(&m, &p).unwrap();
    let (s, u) = m.lattice_coordinates(g1.z());
    assert!((-1e-12..1.0).contains(&s) && (-1e-12..1.0).contains(&u));
    let (a, b) = (
        phi_sections(&m, &p, TOL).unwrap(),
        phi_sections(&m, &g1, TOL).unwrap(),
    );
    assert!(fs(&a.values, &b.values) < 1e-9);

    let both = ApPoint::new(c(0.3, 0.1), vec![Homogeneous::infinity(); 2]).unwrap();
    let g2 = glue_normalize(&m, &both).unwrap();
    assert_eq!(g2.stratum(), 2);
    assert!(g2.coords().iter().all(Homogeneous::is_zero));
    let (a, b) = (
        phi_sections(&m, &both, TOL).unwrap(),
        phi_sections(&m, &g2, TOL).unwrap(),
    );
    assert!(fs(&a.values, &b.values) < 1e-9);
}

#[test]
fn translate_sets() {
    assert_eq!(translate_set_i(&model(1, 3), c(0.2, 0.3)).unwrap().len(), 1);
    let two = translate_set_i(&model(2, 5), c(0.2, 0.3)).unwrap();
    assert_eq!(two.len(), 2);
    let four = translate_set_i(&model(3, 9), c(4.2, 0.7)).unwrap();
    assert_eq!(four.len(), 4);
    let m = model(3, 9);
    for i in 0..4 {
        for j in i + 1..4 {
            assert!(m.e_distance(four[i], four[j]) > 1e-3);
        }
    }
    // tau''_1 = tau_g - tau''_0 + 1e-6 keeps the certificate (relation
    // coefficients are small) only if the floor catches the near coincidence
    let near = DegenerationModel::new(
        3,
        9,
        &[c(0.31, 0.27)],
        &[c(0.21, 0.38), c(0.21 + 1e-5, 0.38)],
        c(0.4, 1.1),
        ModelOptions {
            n_rel: 0,
            ..ModelOptions::default()
        },
    )
    .unwrap();
    assert!(matches!(
        translate_set_i(&near, c(0.5, 0.5)),
        Err(DegenerationError::CoincidentTranslates(1, 2))
    ));
}

#[test]
fn point_invariants() {
    let p = ApPoint::new(
        c(0.1, 0.2),
        vec![
            Homogeneous::affine(c(3.0, 4.0)).unwrap(),
            Homogeneous::zero(),
            Homogeneous::new(c(2.0, 0.0), c(0.0, 0.0)).unwrap(),
        ],
    )
    .unwrap();
    assert_eq!(p.stratum(), 2);
    assert_eq!(p.special(), [1, 2]);
    assert_eq!(p.finite(), [0]);
    assert!(p.is_consistent());
    assert!(Homogeneous::new(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    let big = Homogeneous::affine(c(3.0, 4.0)).unwrap();
    assert_eq!(big.u, c(1.0, 0.0));
    assert!((big.value() - c(3.0, 4.0)).norm() < 1e-15);
}

#[test]
fn tangent_family_shapes() {
    let m = model(2, 5);
    let z = c(0.9, 0.4);
    let v = c(0.6, -0.3);
    let t = tangent_family(&m, &ApPoint::affine(z, &[v]).unwrap(), TOL).unwrap();
    assert_eq!(t.shape(), (3, 5));
    let a = theta_line(&m, z);
    let b = theta_line(&m, z + m.tau_dprime(0));
    let value: Vec<_> = (0..5).map(|k| a[k] + b[k] * v).collect();
    assert!(fs(&t.rows[0], &value) < 1e-12);

    let deep = tangent_family(
        &model(3, 9),
        &ApPoint::affine(z, &[c(0.0, 0.0); 2]).unwrap(),
        TOL,
    )
    .unwrap();
    assert_eq!(deep.shape(), (6, 9));
    assert!(deep
        .labels
        .iter()
        .all(|l| !matches!(l, FamilyRow::Direction { .. })));

    let mid = tangent_family(
        &model(3, 9),
        &ApPoint::affine(z, &[c(0.0, 0.0), c(0.5, 0.5)]).unwrap(),
        TOL,
    )
    .unwrap();
    assert_eq!(mid.shape(), (5, 9));
}

#[test]
fn theta_vector_family_shapes() {
    let z = c(1.1, 0.2);
    assert_eq!(
        theta_vector_family(&model(1, 3), z, 0, TOL)
            .unwrap()
            .shape(),
        (2, 3)
    );
    let f0 = theta_vector_family(&model(3, 9), z, 0, TOL).unwrap();
    assert_eq!(f0.shape(), (8, 9));
    assert!(!f0.exceeds_degree);
    assert_eq!(
        theta_vector_family(&model(3, 9), z, 2, TOL)
            .unwrap()
            .shape(),
        (6, 9)
    );
    assert!(
        theta_vector_family(&model(3, 5), z, 0, TOL)
            .unwrap()
            .exceeds_degree
    );
}

/// Finite-difference images of coordinate directions on every branch
/// through `P` lie in the span of the tangent family.
#[test]
fn tangent_family_contains_numeric_jacobian() {
    let m = model(3, 9);
    let z = c(0.9, 0.4);
    let v = c(0.6, -0.3);
    let p = ApPoint::affine(z, &[c(0.0, 0.0), v]).unwrap();
    let fam = tangent_family(&m, &p, TOL).unwrap();
    let step = 1e-5;
    let one = c(1.0, 0.0);
    // branch K = {} uses (z; w_0, w_1) directly; branch K = {0} sits at
    // (z - tau_0g; 1/w_0'' = 0, t_01^{-1} v) with w_0'' the inverted coordinate
    let branches: [(Complex64, Complex64, bool); 2] = [
        (z, v, false),
        (z - m.tau_dprime(0), m.nome(0, 1).inv() * v, true),
    ];
    for (zb, vb, inverted) in branches {
        let eval = |dz: Complex64, d0: Complex64, d1: Complex64| {
            let c0 = if inverted {
                Homogeneous { u: one, v: d0 }
            } else {
                Homogeneous { u: d0, v: one }
            };
            let c1 = Homogeneous { u: vb + d1, v: one };
            phi_homogeneous(&m, zb + dz, &[c0, c1], TOL).unwrap().values
        };
        let zero = c(0.0, 0.0);
        let h = c(step, 0.0);
        let dirs = [(h, zero, zero), (zero, h, zero), (zero, zero, h)];
        for (dz, d0, d1) in dirs {
            let plus = eval(dz, d0, d1);
            let minus = eval(-dz, -d0, -d1);
            let fd: Vec<Complex64> = plus
                .iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect();
            let r = span_residual(&fam.rows, &fd);
            assert!(r < 1e-5, "branch inverted={inverted}: residual {r}");
        }
    }
}

#[test]
fn limit_small_cases() {
    let r = limit_consistency(&model(1, 3), 1e-3, 5, TOL).unwrap();
    assert!(r.max_deviation < 1e-11);
    let m = model(2, 4);
    let coarse = limit_consistency(&m, 1e-3, 10, TOL).unwrap();
    let fine = limit_consistency(&m, 1e-5, 10, TOL).unwrap();
    assert!(fine.max_deviation < coarse.max_deviation);
    assert!(limit_consistency(&m, 2.0, 1, TOL).is_err());
}

prop_compose! {
    fn glue_case()(
        g in 2usize..=3,
        d in 3u32..=9,
        zr in -10.0f64..10.0,
        zi in -3.0f64..3.0,
        w in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2),
        infinite in proptest::collection::vec(any::<bool>(), 2),
    ) -> (usize, u32, Complex64, Vec<Homogeneous>) {
        let h = g - 1;
        let mut coords: Vec<Homogeneous> = (0..h)
            .map(|i| if infinite[i] { Homogeneous::infinity() } else { Homogeneous::affine(c(w[i].0, w[i].1)).unwrap() })
            .collect();
        if !infinite[..h].iter().any(|&x| x) {
            coords[0] = Homogeneous::infinity();
        }
        (g, d, c(zr, zi), coords)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gluing_is_projectively_exact((g, d, z, coords) in glue_case()) {
        let m = model(g, d);
        let p = ApPoint::new(z, coords).unwrap();
        let q = glue_normalize(&m, &p).unwrap();
        prop_assert!(q.is_consistent());
        prop_assert_eq!(glue_normalize(&m, &q).unwrap(), q.clone());
        let (a, b) = (phi_sections(&m, &p, TOL).unwrap(), phi_sections(&m, &q, TOL).unwrap());
        prop_assert!(fs(&a.values, &b.values) < 1e-9);
    }
}
