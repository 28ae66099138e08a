use std::f64::consts::PI;

use abvar_core::theta::{vartheta_vector, ThetaConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{DiagnosticsError, Result};
use crate::optimize::{nelder_mead, Halton, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductOptions {
    pub samples: usize,
    pub refinements: usize,
    pub refine_evals: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ProductOptions {
    fn default() -> Self {
        Self {
            samples: 4000,
            refinements: 12,
            refine_evals: 3000,
            tol: 1e-14,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductOutcome {
    /// Smallest normalized residual found.
    pub minimum: f64,
    /// `(z_1, ..., z_g)` attaining it.
    pub witness: Vec<Complex64>,
    /// For each factor, the index `lambda` of the section smallest at `z_j`.
    pub vanishing: Vec<usize>,
    pub evaluations: usize,
}

struct Factors<'a> {
    taus: &'a [Complex64],
    d: u32,
    tol: f64,
    cfg: ThetaConfig,
}

impl Factors<'_> {
    /// `vartheta_lambda(tau_j, z_j) / G_j(z_j)` for every `j` and `lambda`.
    fn scaled(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        z.iter()
            .zip(self.taus)
            .map(|(&x, &t)| {
                let v = vartheta_vector(t, x, self.d, self.tol, false, &self.cfg)?;
                let g = (PI * x.im * x.im / t.im).exp();
                Ok(v.values.iter().map(|y| y / g).collect())
            })
            .collect()
    }

    /// `|(prod_j vartheta_lambda(tau_j, z_j))_lambda| / prod_j G_j(z_j)`.
    fn residual(&self, z: &[Complex64]) -> Result<f64> {
        let f = self.scaled(z)?;
        let mut sq = 0.0;
        for lambda in 0..self.d as usize {
            sq += f.iter().map(|v| v[lambda].norm()).product::<f64>().powi(2);
        }
        Ok(sq.sqrt())
    }

    fn point(&self, p: &[f64]) -> Vec<Complex64> {
        self.taus
            .iter()
            .enumerate()
            .map(|(j, &t)| f64::from(self.d) * p[2 * j] + t * p[2 * j + 1])
            .collect()
    }

    /// Newton iteration on the section closest to vanishing in each factor.
    fn polish(&self, z: &mut [Complex64]) -> Result<Vec<usize>> {
        let mut vanishing = Vec::with_capacity(z.len());
        for (x, &t) in z.iter_mut().zip(self.taus) {
            let v = vartheta_vector(t, *x, self.d, self.tol, false, &self.cfg)?;
            let lambda = (0..v.values.len())
                .min_by(|&a, &b| v.values[a].norm().total_cmp(&v.values[b].norm()))
                .unwrap_or(0);
            vanishing.push(lambda);
            for _ in 0..40 {
                let w = vartheta_vector(t, *x, self.d, self.tol, true, &self.cfg)?;
                let step = w.values[lambda] / w.derivatives[lambda];
                if !(step.norm() < 0.5) {
                    break;
                }
                *x -= step;
                if step.norm() < 1e-15 * (1.0 + x.norm()) {
                    break;
                }
            }
        }
        Ok(vanishing)
    }
}

/// Searches for a common zero of the products
/// `P_lambda(z) = prod_j vartheta_lambda(tau_j, z_j)`, `lambda = 0..d`, on
/// `E_1 x ... x E_g` with `E_j = C / (Z d + Z tau_j)`, minimizing the
/// envelope-normalized residual by a Halton sweep, simplex refinement and
/// a final Newton step on the factor sections that nearly vanish.
pub fn product_construction_check(
    taus: &[Complex64],
    d: u32,
    opts: &ProductOptions,
) -> Result<ProductOutcome> {
    if taus.is_empty() {
        return Err(DiagnosticsError::Precondition(
            "at least one elliptic factor is required".into(),
        ));
    }
    if d < 2 {
        return Err(DiagnosticsError::Precondition(format!(
            "degree must be at least 2, got {d}"
        )));
    }
    if let Some(t) = taus.iter().find(|t| !(t.im > 0.0)) {
        return Err(DiagnosticsError::Precondition(format!(
            "Im tau must be positive, got {t}"
        )));
    }
    if 2 * taus.len() > 16 {
        return Err(DiagnosticsError::Precondition(
            "at most 8 elliptic factors are supported".into(),
        ));
    }
    let f = Factors {
        taus,
        d,
        tol: opts.tol,
        cfg: ThetaConfig::default(),
    };
    let eval = |p: &[f64]| f.residual(&f.point(p)).unwrap_or(f64::INFINITY);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut halton = Halton::new((0..2 * taus.len()).map(|_| rng.gen()).collect());
    let sweep: Vec<Vec<f64>> = (0..opts.samples.max(1))
        .map(|_| halton.next_point())
        .collect();
    let values: Vec<f64> = sweep.par_iter().map(|p| eval(p)).collect();
    let mut order: Vec<usize> = (0..sweep.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let simplex = SimplexOptions {
        max_evals: opts.refine_evals,
        f_tol: 0.0,
        x_tol: 1e-14,
        target: 0.0,
    };
    let starts: Vec<usize> = order
        .iter()
        .take(opts.refinements.max(1))
        .copied()
        .collect();
    let refined: Vec<_> = starts
        .par_iter()
        .map(|&i| {
            let m = nelder_mead(eval, &sweep[i], &vec![0.02; sweep[i].len()], &simplex);
            let mut z = f.point(&m.x);
            let before = m.f;
            let vanishing = f.polish(&mut z);
            let after = f.residual(&z);
            match (vanishing, after) {
                (Ok(v), Ok(r)) if r < before => (r, z, v, m.evals),
                _ => (before, f.point(&m.x), Vec::new(), m.evals),
            }
        })
        .collect();

    let mut evaluations = sweep.len();
    let mut best: Option<(f64, Vec<Complex64>, Vec<usize>)> = None;
    for (r, z, v, evals) in refined {
        evaluations += evals;
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, z, v));
        }
    }
    let (minimum, witness, mut vanishing) = best.expect("at least one refinement");
    if vanishing.is_empty() {
        vanishing = f
            .scaled(&witness)?
            .iter()
            .map(|v| {
                (0..v.len())
                    .min_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
                    .unwrap_or(0)
            })
            .collect();
    }
    Ok(ProductOutcome {
        minimum,
        witness,
        vanishing,
        evaluations,
    })
}
