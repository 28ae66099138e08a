use std::f64::consts::PI;

use abvar_core::degeneration::{glue_normalize, ApPoint, DegenerationModel, Homogeneous};
use abvar_core::theta::e_of;
use num_complex::Complex64;

use super::Result;

/// Real parameterization of one stratum chart of the degenerate fiber.
///
/// Parameters are `(s, u)` with `z = s d + u tau_g`, followed by a pair
/// `(theta, phi)` per free coordinate, placing it at
/// `(sin(theta/2) e^{i phi} : cos(theta/2))` on the Riemann sphere.
/// Coordinates listed in `zeros` are pinned to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointChart {
    h: usize,
    zeros: Vec<usize>,
    free: Vec<usize>,
}

impl PointChart {
    pub fn new(g: usize, zeros: &[usize]) -> Self {
        let h = g - 1;
        let free = (0..h).filter(|i| !zeros.contains(i)).collect();
        Self {
            h,
            zeros: zeros.to_vec(),
            free,
        }
    }

    /// Every coordinate free: covers the whole fiber.
    pub fn full(g: usize) -> Self {
        Self::new(g, &[])
    }

    pub fn dim(&self) -> usize {
        2 + 2 * self.free.len()
    }

    pub fn zeros(&self) -> &[usize] {
        &self.zeros
    }

    /// Maps a point of the unit cube to parameters, uniformly in `(s, u)` and
    /// area-uniformly on each sphere.
    pub fn from_unit(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![x[0], x[1]];
        for k in 0..self.free.len() {
            p.push((1.0 - 2.0 * x[2 + 2 * k]).clamp(-1.0, 1.0).acos());
            p.push(2.0 * PI * x[3 + 2 * k]);
        }
        p
    }

    /// Initial simplex edges for local refinement.
    pub fn steps(&self, scale: f64) -> Vec<f64> {
        let mut s = vec![0.05 * scale, 0.05 * scale];
        for _ in &self.free {
            s.extend([0.2 * scale, 0.3 * scale]);
        }
        s
    }

    pub fn z(&self, model: &DegenerationModel, p: &[f64]) -> Complex64 {
        f64::from(model.d()) * p[0] + model.tau_g() * p[1]
    }

    pub fn coords(&self, p: &[f64]) -> Vec<Homogeneous> {
        let mut c = vec![Homogeneous::zero(); self.h];
        for (k, &i) in self.free.iter().enumerate() {
            let (theta, phi) = (p[2 + 2 * k], p[3 + 2 * k]);
            let (s, co) = (0.5 * theta).sin_cos();
            c[i] = Homogeneous {
                u: Complex64::from_polar(s, phi),
                v: Complex64::new(co, 0.0),
            };
        }
        c
    }

    pub fn point(&self, model: &DegenerationModel, p: &[f64]) -> Result<ApPoint> {
        Ok(ApPoint::new(self.z(model, p), self.coords(p))?)
    }

    /// Parameters of a point on this chart; the point's zero pattern must
    /// match the chart where pinned.
    pub fn params_of(&self, model: &DegenerationModel, point: &ApPoint) -> Vec<f64> {
        let (s, u) = model.lattice_coordinates(point.z());
        let mut p = vec![s, u];
        for &i in &self.free {
            let c = point.coords()[i];
            let norm = (c.u.norm_sqr() + c.v.norm_sqr()).sqrt();
            // rotate so that v is real and nonnegative
            let phase = if c.v.norm() > 0.0 {
                c.v.conj() / c.v.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let (u, v) = (c.u * phase / norm, (c.v * phase).re / norm);
            p.push(2.0 * u.norm().atan2(v));
            p.push(u.arg());
        }
        p
    }
}

/// Chordal distance `|u1 v2 - u2 v1| / (|(u1, v1)| |(u2, v2)|)` on `P^1`.
pub fn chordal(a: &Homogeneous, b: &Homogeneous) -> f64 {
    let na = (a.u.norm_sqr() + a.v.norm_sqr()).sqrt();
    let nb = (b.u.norm_sqr() + b.v.norm_sqr()).sqrt();
    (a.u * b.v - b.u * a.v).norm() / (na * nb)
}

fn to_zero(a: &Homogeneous) -> f64 {
    a.u.norm() / (a.u.norm_sqr() + a.v.norm_sqr()).sqrt()
}

fn to_infinity(a: &Homogeneous) -> f64 {
    a.v.norm() / (a.u.norm_sqr() + a.v.norm_sqr()).sqrt()
}

/// Distance between two points of the degenerate fiber in chart
/// coordinates: the largest of `|z - z'|` and the chordal distances of the
/// coordinates, minimized over lattice translates of `E` and over passing
/// through the glued double loci, where a coordinate near infinity on one
/// side meets a coordinate near zero on the other with `z` shifted by `tau_ig`.
pub fn separation(model: &DegenerationModel, p: &ApPoint, q: &ApPoint) -> Result<f64> {
    let p = glue_normalize(model, p)?;
    let q = glue_normalize(model, q)?;
    Ok(oriented(model, &p, &q).min(oriented(model, &q, &p)))
}

fn oriented(model: &DegenerationModel, p: &ApPoint, q: &ApPoint) -> f64 {
    let h = model.g() - 1;
    let (pc, qc) = (p.coords(), q.coords());
    let mut best = f64::INFINITY;
    // mode per coordinate: 0 direct, 1 p near infinity, 2 q near infinity
    let combos = 3usize.pow(h as u32);
    for code in 0..combos {
        let mut modes = vec![0u8; h];
        let mut c = code;
        for m in modes.iter_mut() {
            *m = (c % 3) as u8;
            c /= 3;
        }
        let (mut zp, mut zq) = (p.z(), q.z());
        let mut sp: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); h];
        let mut sq = sp.clone();
        for (i, &m) in modes.iter().enumerate() {
            let (z, scale) = match m {
                1 => (&mut zp, &mut sp),
                2 => (&mut zq, &mut sq),
                _ => continue,
            };
            *z += model.tau_dprime(i);
            for (j, s) in scale.iter_mut().enumerate() {
                if j != i {
                    *s *= model.nome(i, j);
                }
            }
        }
        let coord_term = |n: i64| -> f64 {
            let mut worst: f64 = 0.0;
            for i in 0..h {
                let t = match modes[i] {
                    1 => to_infinity(&pc[i]) + to_zero(&qc[i]),
                    2 => to_zero(&pc[i]) + to_infinity(&qc[i]),
                    _ => {
                        let a = Homogeneous {
                            u: pc[i].u * sp[i],
                            v: pc[i].v,
                        };
                        let twist = e_of(model.tau_dprime(i) * n as f64);
                        let b = Homogeneous {
                            u: qc[i].u * sq[i] * twist,
                            v: qc[i].v,
                        };
                        chordal(&a, &b)
                    }
                };
                worst = worst.max(t);
            }
            worst
        };
        let (s0, u0) = model.lattice_coordinates(zp - zq);
        let (s0, u0) = (s0.round() as i64, u0.round() as i64);
        for n in u0 - 1..=u0 + 1 {
            for m in s0 - 1..=s0 + 1 {
                let dz =
                    (zp - zq - f64::from(model.d()) * m as f64 - model.tau_g() * n as f64).norm();
                if dz >= best {
                    continue;
                }
                best = best.min(dz.max(coord_term(n)));
            }
        }
    }
    best
}
