use abvar_core::degeneration::{
    fs_distance, glue_normalize, phi_homogeneous, phi_sections, tangent_family, ApPoint,
    DegenerationModel, Homogeneous,
};
use abvar_core::theta::e_of;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::points::{separation, PointChart};
use super::{is_morphism_range, DiagnosticsError, Result};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::rank::numerical_rank;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityOptions {
    /// Total number of seeded restarts.
    pub restarts: usize,
    /// Restarts, out of `restarts`, that search for `phi(P) = phi(sigma P)`
    /// along the involutions `sigma`; the rest search over free pairs.
    pub involution_restarts: usize,
    /// Evaluation budget of the screening descent of a free-pair restart.
    pub screen_evals: usize,
    /// Screened restarts whose objective is below this are refined further.
    pub screen_threshold: f64,
    /// At most this many screened free-pair restarts, best first, are refined.
    pub refinements: usize,
    pub refine_evals: usize,
    /// Collision threshold on the Fubini-Study distance.
    pub delta_coll: f64,
    pub tol: f64,
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for InjectivityOptions {
    fn default() -> Self {
        Self {
            restarts: 10_000,
            involution_restarts: 1024,
            screen_evals: 150,
            screen_threshold: 0.05,
            refinements: 256,
            refine_evals: 6000,
            delta_coll: 1e-8,
            tol: 1e-13,
            tol_rel: 1e-8,
            seed: 0,
        }
    }
}

/// How a restart chose its starting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Seeding {
    /// `Q = sigma_{a,b}(P)` for the involution `sigma_{a,b}`.
    Involution {
        a: u32,
        b: u32,
    },
    /// `P` and `Q` over points `x`, `y` whose translate sets `I(x)`, `I(y)` overlap.
    Overlap,
    Random,
}

/// Two distinct points of the fiber with (numerically) equal images.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionWitness {
    pub p: ApPoint,
    pub q: ApPoint,
    pub fs_distance: f64,
    /// Distance after re-verification at ten times tighter tolerances.
    pub refined_fs_distance: f64,
    pub separation: f64,
    pub rank_p: usize,
    pub rank_q: usize,
    pub expected_rank_p: usize,
    pub expected_rank_q: usize,
    pub seeding: Seeding,
}

impl CollisionWitness {
    /// Full differential rank at both points.
    pub fn is_transversal(&self) -> bool {
        self.rank_p == self.expected_rank_p && self.rank_q == self.expected_rank_q
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchCoverage {
    pub restarts: usize,
    pub involution_restarts: usize,
    pub overlap_restarts: usize,
    pub random_restarts: usize,
    /// Involution restarts whose Newton iteration converged.
    pub involution_converged: usize,
    /// Free-pair restarts that passed screening and were refined.
    pub refined: usize,
    pub evaluations: usize,
    /// Candidates below the collision threshold before re-verification.
    pub candidates: usize,
    /// Candidates that failed re-verification.
    pub discarded: usize,
    /// Smallest Fubini-Study distance over refined pairs separated by at
    /// least the floor.
    pub best_fs_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityOutcome {
    /// Verified witnesses, sorted by `fs_distance`, one per unordered pair.
    pub witnesses: Vec<CollisionWitness>,
    pub coverage: SearchCoverage,
}

/// `iota A^a B^b` applied to `p`, where
/// `B: (z; w) -> (z + tau_g/d; w_i e(tau_ig / d))`,
/// `A: (z; w) -> (z + 1; w)` and
/// `iota: (z; w) -> (-z - sum_i tau_ig; 1 / (T_i w_i))` with
/// `T_i = prod_{j != i} t_ij`. Each of these maps acts on `phi` through a
/// linear automorphism of `C^d`.
pub fn involution_image(model: &DegenerationModel, p: &ApPoint, a: u32, b: u32) -> Result<ApPoint> {
    let h = model.g() - 1;
    let d = f64::from(model.d());
    let mut z = p.z() + model.tau_g() * (f64::from(b) / d) + f64::from(a);
    let mut coords: Vec<Homogeneous> = p
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| c.scaled(e_of(model.tau_dprime(i) * (f64::from(b) / d))))
        .collect::<std::result::Result<_, _>>()?;
    z = -z - model.tau_dprime_all().iter().sum::<Complex64>();
    for (i, c) in coords.iter_mut().enumerate() {
        let t: Complex64 = (0..h)
            .filter(|&j| j != i)
            .map(|j| model.nome(i, j))
            .product();
        *c = Homogeneous::new(c.v, c.u * t)?;
    }
    Ok(ApPoint::new(z, coords)?)
}

/// Matrix of the linear map through which `iota A^a B^b` acts on `phi`:
/// `phi(sigma P)` is proportional to `M phi(P)`.
pub fn involution_action(d: u32, a: u32, b: u32) -> DMatrix<Complex64> {
    let n = d as usize;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let j = (n - k) % n;
        m[(k, (j + b as usize) % n)] =
            e_of(Complex64::new(f64::from(a) * j as f64 / f64::from(d), 0.0));
    }
    m
}

/// Orthonormal bases of the two eigenspaces of `m`, which must square to a
/// multiple of the identity.
fn eigenbases(m: &DMatrix<Complex64>) -> Option<[DMatrix<Complex64>; 2]> {
    let n = m.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let m2 = m * m;
    let c = m2[(0, 0)];
    if (&m2 - &id * c).norm() > 1e-12 * c.norm() * n as f64 {
        return None;
    }
    let s = c.sqrt();
    let basis = |sign: f64| {
        let proj = (&id + m * Complex64::new(sign, 0.0) / s) * Complex64::new(0.5, 0.0);
        let svd = proj.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let keep: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] > 0.5).collect();
        DMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
    };
    Some([basis(1.0), basis(-1.0)])
}

/// Affine chart point `(z; w)`: coordinate `i` is `(w_i : 1)`, or `(1 : w_i)` when flipped.
struct Affine {
    y: Vec<Complex64>,
    flipped: Vec<bool>,
}

impl Affine {
    fn coords(&self, y: &[Complex64]) -> Vec<Homogeneous> {
        let one = Complex64::new(1.0, 0.0);
        y[1..]
            .iter()
            .zip(&self.flipped)
            .map(|(&w, &f)| {
                if f {
                    Homogeneous { u: one, v: w }
                } else {
                    Homogeneous { u: w, v: one }
                }
            })
            .collect()
    }
}

struct Search<'a> {
    model: &'a DegenerationModel,
    chart: PointChart,
    opts: InjectivityOptions,
}

/// A pair of points and the objective at it.
struct Evaluated {
    p: ApPoint,
    q: ApPoint,
    fs: f64,
    sep: f64,
}

impl Search<'_> {
    fn pair(&self, x: &[f64], seeding: Seeding) -> Result<(ApPoint, ApPoint)> {
        let n = self.chart.dim();
        let p = self.chart.point(self.model, &x[..n])?;
        let q = match seeding {
            Seeding::Involution { a, b } => involution_image(self.model, &p, a, b)?,
            _ => self.chart.point(self.model, &x[n..])?,
        };
        Ok((p, q))
    }

    fn evaluate(&self, x: &[f64], seeding: Seeding, tol: f64) -> Result<Evaluated> {
        let (p, q) = self.pair(x, seeding)?;
        let a = phi_sections(self.model, &p, tol)?;
        let b = phi_sections(self.model, &q, tol)?;
        let fs = fs_distance(&a.values, &b.values).unwrap_or(1.0);
        let sep = separation(self.model, &p, &q)?;
        Ok(Evaluated { p, q, fs, sep })
    }

    /// Fubini-Study distance relative to the separation, so that pairs
    /// collapsing onto the diagonal are not rewarded.
    fn objective(&self, x: &[f64], seeding: Seeding, tol: f64) -> f64 {
        match self.evaluate(x, seeding, tol) {
            Ok(e) => e.fs / e.sep.min(1.0),
            Err(_) => f64::INFINITY,
        }
    }

    /// Component of `phi(Q)` orthogonal to `phi(P)`, relative to `|phi(Q)|`,
    /// as real and imaginary parts; its norm is the Fubini-Study distance.
    fn residual(&self, x: &[f64], seeding: Seeding, tol: f64) -> Option<Vec<f64>> {
        let (p, q) = self.pair(x, seeding).ok()?;
        let a = phi_sections(self.model, &p, tol).ok()?.values;
        let b = phi_sections(self.model, &q, tol).ok()?.values;
        let aa: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        let bb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        if !(aa > 0.0 && bb > 0.0 && aa.is_finite() && bb.is_finite()) {
            return None;
        }
        let coef = a
            .iter()
            .zip(&b)
            .map(|(u, v)| u.conj() * v)
            .sum::<Complex64>()
            / aa;
        let scale = bb.sqrt();
        Some(
            a.iter()
                .zip(&b)
                .flat_map(|(u, v)| {
                    let r = (v - coef * u) / scale;
                    [r.re, r.im]
                })
                .collect(),
        )
    }

    /// Levenberg-Marquardt on [`Self::residual`] with forward differences.
    fn polish(&self, x0: &[f64], seeding: Seeding, tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
        let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
        let mut x = x0.to_vec();
        let Some(mut r) = self.residual(&x, seeding, tol) else {
            return (x, 1);
        };
        let mut evals = 1;
        let mut mu = 1e-3;
        let n = x.len();
        for _ in 0..max_iter {
            let f0 = norm(&r);
            if f0 < 1e-30 {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(r.len(), n);
            for j in 0..n {
                let h = 1e-7 * (1.0 + x[j].abs());
                let mut xh = x.clone();
                xh[j] += h;
                evals += 1;
                let Some(rh) = self.residual(&xh, seeding, tol) else {
                    return (x, evals);
                };
                for (i, (a, b)) in rh.iter().zip(&r).enumerate() {
                    jac[(i, j)] = (a - b) / h;
                }
            }
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let grad = &jt * DVector::from_column_slice(&r);
            let mut improved = false;
            while mu < 1e12 {
                let mut m = normal.clone();
                for j in 0..n {
                    m[(j, j)] += mu * normal[(j, j)].max(1e-12);
                }
                let Some(step) = m.lu().solve(&(-&grad)) else {
                    break;
                };
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                evals += 1;
                match self.residual(&trial, seeding, tol) {
                    Some(rt) if norm(&rt) < f0 => {
                        x = trial;
                        r = rt;
                        mu = (mu * 0.3).max(1e-12);
                        improved = true;
                        break;
                    }
                    _ => mu *= 10.0,
                }
            }
            if !improved {
                break;
            }
        }
        (x, evals)
    }

    fn steps(&self, seeding: Seeding) -> Vec<f64> {
        let mut s = self.chart.steps(1.0);
        if !matches!(seeding, Seeding::Involution { .. }) {
            s.extend(self.chart.steps(1.0));
        }
        s
    }

    fn random_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let unit: Vec<f64> = (0..self.chart.dim()).map(|_| rng.gen()).collect();
        self.chart.from_unit(&unit)
    }

    /// Starting pair of free-pair restart `r`.
    fn seed(&self, r: usize, rng: &mut ChaCha8Rng) -> (Seeding, Vec<f64>) {
        let mut x = self.random_params(rng);
        if (r - self.opts.involution_restarts).is_multiple_of(2) {
            // y = x + (q - q') tau'' for distinct masks q, q'
            let h = self.model.g() - 1;
            let mut y = self.random_params(rng);
            let masks = 1u32 << h;
            let q = rng.gen_range(0..masks);
            let q2 = (q + rng.gen_range(1..masks.max(2))) % masks.max(1);
            let shift: Complex64 = (0..h)
                .map(|i| {
                    self.model.tau_dprime(i) * (f64::from(q >> i & 1) - f64::from(q2 >> i & 1))
                })
                .sum();
            let (s, u) = self
                .model
                .lattice_coordinates(self.chart.z(self.model, &x) + shift);
            y[0] = s;
            y[1] = u;
            x.extend(y);
            (Seeding::Overlap, x)
        } else {
            x.extend(self.random_params(rng));
            (Seeding::Random, x)
        }
    }

    /// Involution restart: Newton's method on the component of `phi(P)`
    /// outside one eigenspace of the action of `sigma`, from a random start.
    /// Its zeros are the fixed points of `sigma` and the pairs `P`, `sigma P`
    /// with equal images.
    fn solve(&self, r: usize) -> (RestartResult, bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        rng.set_stream(r as u64);
        let class = (r % 4) as u32;
        let (a, b) = (class & 1, class >> 1);
        let seeding = Seeding::Involution { a, b };
        let target = (r / 4) % 2;
        let tol = self.opts.tol;
        let model = self.model;
        let d = f64::from(model.d());
        let h = model.g() - 1;

        let mut pt = Affine {
            y: Vec::with_capacity(h + 1),
            flipped: (0..h).map(|_| rng.gen_bool(0.5)).collect(),
        };
        pt.y.push(d * rng.gen::<f64>() + model.tau_g() * rng.gen::<f64>());
        for _ in 0..h {
            pt.y.push(Complex64::from_polar(
                rng.gen::<f64>().sqrt(),
                std::f64::consts::TAU * rng.gen::<f64>(),
            ));
        }
        let mut evals = 0;
        let mut converged = false;
        if let Some(bases) = eigenbases(&involution_action(model.d(), a, b)) {
            let other = &bases[1 - target];
            let mut system = |pt: &Affine, y: &[Complex64]| -> Option<(DVector<Complex64>, f64)> {
                evals += 1;
                let phi = phi_homogeneous(model, y[0], &pt.coords(y), tol)
                    .ok()?
                    .values;
                let v = DVector::from_column_slice(&phi);
                Some((other.adjoint() * &v, v.norm()))
            };
            for _ in 0..40 {
                let Some((f, scale)) = system(&pt, &pt.y) else {
                    break;
                };
                if f.norm() <= 1e-14 * scale {
                    converged = true;
                    break;
                }
                let mut jac = DMatrix::<Complex64>::zeros(f.len(), h + 1);
                let mut ok = true;
                for j in 0..=h {
                    let step = 1e-5 * (1.0 + pt.y[j].norm());
                    let (mut yp, mut ym) = (pt.y.clone(), pt.y.clone());
                    yp[j] += step;
                    ym[j] -= step;
                    match (system(&pt, &yp), system(&pt, &ym)) {
                        (Some((fp, _)), Some((fm, _))) => {
                            jac.set_column(j, &((fp - fm) / Complex64::new(2.0 * step, 0.0)))
                        }
                        _ => ok = false,
                    }
                }
                if !ok {
                    break;
                }
                let svd = jac.svd(true, true);
                let cut = 1e-12 * svd.singular_values.max();
                let Ok(mut delta) = svd.solve(&(-f), cut) else {
                    break;
                };
                let len = delta.norm();
                if !(len.is_finite()) {
                    break;
                }
                if len > 0.5 {
                    delta *= Complex64::new(0.5 / len, 0.0);
                }
                for (y, dy) in pt.y.iter_mut().zip(delta.iter()) {
                    *y += dy;
                }
                for i in 0..h {
                    if pt.y[i + 1].norm() > 2.0 {
                        pt.y[i + 1] = pt.y[i + 1].inv();
                        pt.flipped[i] = !pt.flipped[i];
                    }
                }
                if len < 1e-15 {
                    break;
                }
            }
        }
        let x = ApPoint::new(pt.y[0], pt.coords(&pt.y))
            .map(|p| self.chart.params_of(model, &p))
            .unwrap_or_else(|_| vec![0.0; self.chart.dim()]);
        let result = self.evaluate(&x, seeding, tol).ok();
        (
            RestartResult {
                seeding,
                x,
                evals: evals + 1,
                result,
            },
            converged,
        )
    }

    fn screen(&self, r: usize) -> Screened {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        rng.set_stream(r as u64);
        let (seeding, x0) = self.seed(r, &mut rng);
        let tol = self.opts.tol;
        let f = |x: &[f64]| self.objective(x, seeding, tol);
        let screen = SimplexOptions {
            max_evals: self.opts.screen_evals,
            f_tol: 0.0,
            x_tol: 0.0,
            target: 0.0,
        };
        let m = nelder_mead(f, &x0, &self.steps(seeding), &screen);
        Screened {
            seeding,
            x: m.x,
            f: m.f,
            evals: m.evals,
        }
    }

    fn refine(&self, s: &Screened) -> RestartResult {
        let tol = self.opts.tol;
        let f = |x: &[f64]| self.objective(x, s.seeding, tol);
        let deep = SimplexOptions {
            max_evals: self.opts.refine_evals,
            f_tol: 0.0,
            x_tol: 1e-13,
            target: self.opts.delta_coll * 1e-3,
        };
        let step: Vec<f64> = self.steps(s.seeding).iter().map(|v| v * 0.1).collect();
        let m = nelder_mead(f, &s.x, &step, &deep);
        let (polished, polish_evals) = self.polish(&m.x, s.seeding, tol, 40);
        let x = if self.objective(&polished, s.seeding, tol) < m.f {
            polished
        } else {
            m.x
        };
        let result = self.evaluate(&x, s.seeding, tol).ok();
        RestartResult {
            seeding: s.seeding,
            x,
            evals: m.evals + polish_evals + 1,
            result,
        }
    }

    /// Re-runs the descent from a candidate at ten times tighter tolerances
    /// and recomputes the differential ranks.
    fn verify(&self, r: &RestartResult) -> Result<Option<CollisionWitness>> {
        let tol = self.opts.tol / 10.0;
        let f = |x: &[f64]| self.objective(x, r.seeding, tol);
        let step: Vec<f64> = self.steps(r.seeding).iter().map(|s| s * 1e-3).collect();
        let tight = SimplexOptions {
            max_evals: self.opts.refine_evals,
            f_tol: 0.0,
            x_tol: 1e-14,
            target: self.opts.delta_coll * 1e-4,
        };
        let m = nelder_mead(f, &r.x, &step, &tight);
        let e = self.evaluate(&m.x, r.seeding, tol)?;
        let floor = self.model.options().separation_floor;
        if !(e.fs < self.opts.delta_coll && e.sep >= floor) {
            return Ok(None);
        }
        let first = r.result.as_ref().map_or(e.fs, |c| c.fs);
        let p = glue_normalize(self.model, &e.p)?;
        let q = glue_normalize(self.model, &e.q)?;
        let rank_at = |pt: &ApPoint| -> Result<usize> {
            let fam = tangent_family(self.model, pt, tol)?;
            Ok(numerical_rank(&fam.rows, self.opts.tol_rel)?.rank)
        };
        let g = self.model.g();
        Ok(Some(CollisionWitness {
            rank_p: rank_at(&p)?,
            rank_q: rank_at(&q)?,
            expected_rank_p: g + p.stratum() + 1,
            expected_rank_q: g + q.stratum() + 1,
            p,
            q,
            fs_distance: first,
            refined_fs_distance: e.fs,
            separation: e.sep,
            seeding: r.seeding,
        }))
    }
}

struct Screened {
    seeding: Seeding,
    x: Vec<f64>,
    f: f64,
    evals: usize,
}

struct RestartResult {
    seeding: Seeding,
    x: Vec<f64>,
    evals: usize,
    result: Option<Evaluated>,
}

/// Multi-start search for pairs `P != Q` with `phi(P) = phi(Q)`.
///
/// The first `involution_restarts` restarts solve for `phi(P)` lying in an
/// eigenspace of the action of `sigma = iota A^a B^b`, `a, b in {0, 1}`, by
/// Newton's method, which gives `phi(P) = phi(sigma P)`. The others minimize
/// the distance over free pairs, half of them started from points with
/// overlapping translate sets; each gets a short screening descent and the
/// best `refinements` below `screen_threshold` are refined. Candidates below
/// `delta_coll` are kept only if they survive
/// [re-verification](CollisionWitness::refined_fs_distance).
pub fn injectivity_search(
    model: &DegenerationModel,
    opts: &InjectivityOptions,
) -> Result<InjectivityOutcome> {
    let g = model.g();
    if !is_morphism_range(g, model.d()) {
        return Err(DiagnosticsError::Precondition(format!(
            "d = {} must exceed 2^(g-1) = {} for the map to be defined",
            model.d(),
            1u64 << (g - 1)
        )));
    }
    if g < 2 {
        return Err(DiagnosticsError::Precondition(
            "the collision search needs g >= 2".into(),
        ));
    }
    let search = Search {
        model,
        chart: PointChart::full(g),
        opts: *opts,
    };
    let n_inv = opts.involution_restarts.min(opts.restarts);
    let solved: Vec<(RestartResult, bool)> = (0..n_inv)
        .into_par_iter()
        .map(|r| search.solve(r))
        .collect();
    let screened: Vec<Screened> = (n_inv..opts.restarts)
        .into_par_iter()
        .map(|r| search.screen(r))
        .collect();
    let mut promising: Vec<usize> = (0..screened.len())
        .filter(|&i| screened[i].f < opts.screen_threshold)
        .collect();
    promising.sort_by(|&a, &b| screened[a].f.total_cmp(&screened[b].f).then(a.cmp(&b)));
    promising.truncate(opts.refinements);
    promising.sort_unstable();
    let refined: Vec<RestartResult> = promising
        .par_iter()
        .map(|&i| search.refine(&screened[i]))
        .collect();

    let floor = model.options().separation_floor;
    let mut cov = SearchCoverage {
        restarts: opts.restarts,
        involution_restarts: n_inv,
        best_fs_distance: f64::INFINITY,
        ..Default::default()
    };
    let mut candidates = Vec::new();
    for s in &screened {
        match s.seeding {
            Seeding::Overlap => cov.overlap_restarts += 1,
            _ => cov.random_restarts += 1,
        }
        cov.evaluations += s.evals;
    }
    cov.involution_converged = solved.iter().filter(|s| s.1).count();
    let results: Vec<RestartResult> = solved.into_iter().map(|s| s.0).chain(refined).collect();
    cov.refined = results.len() - n_inv;
    for r in &results {
        cov.evaluations += r.evals;
        if let Some(e) = &r.result {
            if e.sep >= floor {
                cov.best_fs_distance = cov.best_fs_distance.min(e.fs);
                if e.fs < opts.delta_coll {
                    candidates.push(r);
                }
            }
        }
    }
    cov.candidates = candidates.len();
    let verified: Vec<Option<CollisionWitness>> = candidates
        .par_iter()
        .map(|r| search.verify(r))
        .collect::<Result<_>>()?;
    cov.discarded = verified.iter().filter(|v| v.is_none()).count();

    let mut witnesses: Vec<CollisionWitness> = verified.into_iter().flatten().collect();
    witnesses.sort_by(|a, b| a.fs_distance.total_cmp(&b.fs_distance));
    let mut distinct: Vec<CollisionWitness> = Vec::new();
    for w in witnesses {
        let same = |x: &ApPoint, y: &ApPoint| separation(model, x, y).is_ok_and(|s| s < 1e-6);
        let duplicate = distinct.iter().any(|o| {
            (same(&o.p, &w.p) && same(&o.q, &w.q)) || (same(&o.p, &w.q) && same(&o.q, &w.p))
        });
        if !duplicate {
            distinct.push(w);
        }
    }
    Ok(InjectivityOutcome {
        witnesses: distinct,
        coverage: cov,
    })
}
