use std::f64::consts::PI;

use abvar_core::degeneration::{phi_homogeneous, ApPoint, DegenerationModel, Homogeneous};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::points::PointChart;
use super::Result;
use crate::optimize::{nelder_mead, Halton, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseLocusOptions {
    /// Quasi-random sweep points per stratum.
    pub samples_per_stratum: usize,
    /// Best sweep points refined per stratum.
    pub refinements: usize,
    /// Evaluation budget of each refinement.
    pub refine_evals: usize,
    /// Truncation tolerance of the series.
    pub tol: f64,
    pub seed: u64,
}

impl Default for BaseLocusOptions {
    fn default() -> Self {
        Self {
            samples_per_stratum: 2000,
            refinements: 8,
            refine_evals: 1500,
            tol: 1e-13,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseLocusOutcome {
    /// Smallest normalized residual found.
    pub minimum: f64,
    /// The point attaining it, glued into normal form.
    pub witness: ApPoint,
    /// Smallest residual on each stratum `h = 0..g`.
    pub per_stratum: Vec<f64>,
    pub evaluations: usize,
}

/// `|phi(z; u : v)| / max_q |c_q u^q v^(1-q)| G(z + q tau'')`, where
/// `G(x) = exp(pi (Im x)^2 / Im tau_g)` is the size of the largest term of
/// the series `vartheta_k(tau_g, x)`. The quotient is invariant under
/// rescaling the homogeneous coordinates and under translation by the
/// periods of `E`.
pub fn normalized_residual(
    model: &DegenerationModel,
    z: Complex64,
    coords: &[Homogeneous],
    tol: f64,
) -> Result<f64> {
    let phi = phi_homogeneous(model, z, coords, tol)?;
    let h = model.g() - 1;
    let y = model.tau_g().im;
    let mut scale: f64 = 0.0;
    for q in 0..1u32 << h {
        let mut w = 1.0;
        let mut x = z;
        for (i, c) in coords.iter().enumerate() {
            if q >> i & 1 == 1 {
                w *= c.u.norm();
                x += model.tau_dprime(i);
            } else {
                w *= c.v.norm();
            }
        }
        for i in 0..h {
            for j in i + 1..h {
                if q >> i & 1 == 1 && q >> j & 1 == 1 {
                    w *= model.nome(i, j).norm();
                }
            }
        }
        scale = scale.max(w * (PI * x.im * x.im / y).exp());
    }
    Ok(phi.norm() / scale)
}

/// Strata of the fiber as zero patterns: every subset of the `g - 1`
/// coordinates, grouped by size.
pub(crate) fn zero_patterns(g: usize) -> Vec<Vec<Vec<usize>>> {
    let h = g - 1;
    let mut by_size = vec![Vec::new(); h + 1];
    for mask in 0..1u32 << h {
        let zeros: Vec<usize> = (0..h).filter(|&i| mask >> i & 1 == 1).collect();
        by_size[zeros.len()].push(zeros);
    }
    by_size
}

/// Minimizes [`normalized_residual`] over the fiber: a stratified Halton
/// sweep of each stratum, then simplex refinement of the best sweep points
/// inside their stratum.
pub fn base_locus_search(
    model: &DegenerationModel,
    opts: &BaseLocusOptions,
) -> Result<BaseLocusOutcome> {
    let g = model.g();
    let mut per_stratum = Vec::with_capacity(g);
    let mut best: Option<(f64, ApPoint)> = None;
    let mut evaluations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for patterns in zero_patterns(g) {
        let quota = opts.samples_per_stratum.div_ceil(patterns.len()).max(1);
        let mut stratum_best = f64::INFINITY;
        for zeros in patterns {
            let chart = PointChart::new(g, &zeros);
            let eval = |p: &[f64]| -> f64 {
                let z = chart.z(model, p);
                normalized_residual(model, z, &chart.coords(p), opts.tol).unwrap_or(f64::INFINITY)
            };
            let mut halton = Halton::new((0..chart.dim()).map(|_| rng.gen()).collect());
            let sweep: Vec<Vec<f64>> = (0..quota)
                .map(|_| chart.from_unit(&halton.next_point()))
                .collect();
            let values: Vec<f64> = sweep.par_iter().map(|p| eval(p)).collect();
            evaluations += quota;
            let mut order: Vec<usize> = (0..quota).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            let simplex = SimplexOptions {
                max_evals: opts.refine_evals,
                f_tol: 0.0,
                x_tol: 1e-13,
                target: 0.0,
            };
            let refined: Vec<_> = order
                .iter()
                .take(opts.refinements)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&&i| nelder_mead(eval, &sweep[i], &chart.steps(0.2), &simplex))
                .collect();
            for m in refined {
                evaluations += m.evals;
                stratum_best = stratum_best.min(m.f);
                if best.as_ref().is_none_or(|b| m.f < b.0) {
                    best = Some((m.f, chart.point(model, &m.x)?));
                }
            }
            if let Some(&i) = order.first() {
                stratum_best = stratum_best.min(values[i]);
                if best.as_ref().is_none_or(|b| values[i] < b.0) {
                    best = Some((values[i], chart.point(model, &sweep[i])?));
                }
            }
        }
        per_stratum.push(stratum_best);
    }
    let (minimum, witness) = best.expect("every stratum has at least one sample");
    let witness = abvar_core::degeneration::glue_normalize(model, &witness)?;
    Ok(BaseLocusOutcome {
        minimum,
        witness,
        per_stratum,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use abvar_core::degeneration::ModelOptions;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn residual_is_invariant_under_periods_and_scaling() {
        let m = DegenerationModel::new(
            2,
            5,
            &[],
            &[c(0.21, 0.38)],
            c(0.4, 1.1),
            ModelOptions::default(),
        )
        .unwrap();
        let z = c(1.3, 0.4);
        let w = Homogeneous::affine(c(0.3, -0.6)).unwrap();
        let r = normalized_residual(&m, z, &[w], 1e-14).unwrap();
        let scaled = Homogeneous {
            u: w.u * c(2.0, 1.0),
            v: w.v * c(2.0, 1.0),
        };
        assert!((normalized_residual(&m, z, &[scaled], 1e-14).unwrap() - r).abs() < 1e-12 * r);
        assert!((normalized_residual(&m, z + 5.0, &[w], 1e-14).unwrap() - r).abs() < 1e-11 * r);
        let twisted = w.scaled(abvar_core::theta::e_of(m.tau_dprime(0))).unwrap();
        let moved = normalized_residual(&m, z + m.tau_g(), &[twisted], 1e-14).unwrap();
        assert!((moved - r).abs() < 1e-9 * r, "{moved} {r}");
    }

    #[test]
    fn single_section_has_a_zero() {
        let m =
            DegenerationModel::new(1, 1, &[], &[], c(0.4, 1.1), ModelOptions::default()).unwrap();
        let opts = BaseLocusOptions {
            samples_per_stratum: 200,
            refinements: 3,
            ..Default::default()
        };
        let out = base_locus_search(&m, &opts).unwrap();
        assert!(out.minimum < 1e-9, "{out:?}");
        let zero = (c(1.0, 0.0) + m.tau_g()) * 0.5;
        assert!(m.e_distance(out.witness.z(), zero) < 1e-6);
    }

    #[test]
    fn no_common_zero_above_the_bound() {
        let m = DegenerationModel::new(
            2,
            3,
            &[],
            &[c(0.21, 0.38)],
            c(0.4, 1.1),
            ModelOptions::default(),
        )
        .unwrap();
        let opts = BaseLocusOptions {
            samples_per_stratum: 400,
            refinements: 4,
            ..Default::default()
        };
        let out = base_locus_search(&m, &opts).unwrap();
        assert_eq!(out.per_stratum.len(), 2);
        assert!(out.minimum > 1e-6, "{out:?}");
    }

    #[test]
    fn zero_patterns_cover_every_subset() {
        let p = zero_patterns(3);
        assert_eq!(p.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(p[2], vec![vec![0, 1]]);
    }
}
