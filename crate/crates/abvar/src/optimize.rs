//! Derivative-free local minimization and low-discrepancy sampling.

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop once the spread of function values in the simplex drops below this.
    pub f_tol: f64,
    /// ... and every vertex lies within this of the best one (max norm).
    pub x_tol: f64,
    /// Stop as soon as the best value drops below this.
    pub target: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            target: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Nelder-Mead simplex descent from `x0` with initial edge lengths `step`.
/// Non-finite objective values are treated as `+inf`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    opts: &SimplexOptions,
) -> Minimum {
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let fx = eval(&x);
        simplex.push((x, fx));
    }
    // Gao-Han dimension-adaptive coefficients.
    let dim = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / dim, 0.75 - 0.5 / dim, 1.0 - 1.0 / dim);
    let mut centroid = vec![0.0; n];
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if best <= opts.target
            || evals.get() >= opts.max_evals
            || (worst - best <= opts.f_tol && size <= opts.x_tol)
        {
            break;
        }
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let xr = along(&centroid, &simplex[n].0, -alpha);
        let fr = eval(&xr);
        if fr < best {
            let xe = along(&centroid, &simplex[n].0, -alpha * gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = along(&centroid, &simplex[n].0, -alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(&centroid, &simplex[n].0, rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x = along(&x_best, &v.0, sigma);
            let fx = eval(&x);
            *v = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Minimum {
        x,
        f,
        evals: evals.get(),
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = u64::from(b);
    let inv = 1.0 / b as f64;
    let (mut x, mut scale) = (0.0, inv);
    while i > 0 {
        x += (i % b) as f64 * scale;
        i /= b;
        scale *= inv;
    }
    x
}

/// Halton sequence in `[0, 1)^dim`, rotated by `shift` modulo 1.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    /// # Panics
    /// If `shift` is longer than the supported 16 dimensions.
    pub fn new(shift: Vec<f64>) -> Self {
        assert!(
            shift.len() <= PRIMES.len(),
            "Halton sequence supports at most {} dimensions",
            PRIMES.len()
        );
        Self { shift, index: 1 }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| {
                let x = radical_inverse(i, b) + s;
                x - x.floor()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SimplexOptions {
            max_evals: 5000,
            ..Default::default()
        };
        let m = nelder_mead(rosen, &[-1.2, 1.0], &[0.1, 0.1], &opts);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4,
            "{m:?}"
        );
    }

    #[test]
    fn finds_cone_minimum_in_six_dimensions() {
        let target = [0.3, -0.2, 1.1, 0.5, -0.7, 0.05];
        let cone = |x: &[f64]| {
            x.iter()
                .zip(&target)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let opts = SimplexOptions {
            max_evals: 20_000,
            f_tol: 0.0,
            x_tol: 1e-12,
            target: 1e-10,
        };
        let m = nelder_mead(cone, &[0.0; 6], &[0.5; 6], &opts);
        assert!(m.f < 1e-9, "{m:?}");
    }

    #[test]
    fn respects_evaluation_budget_and_target() {
        let mut calls = 0;
        let m = nelder_mead(
            |x| {
                calls += 1;
                x[0] * x[0]
            },
            &[3.0],
            &[1.0],
            &SimplexOptions {
                max_evals: 25,
                ..Default::default()
            },
        );
        assert_eq!(calls, m.evals);
        assert!(m.evals <= 27);
        let m = nelder_mead(
            |x| x[0].abs(),
            &[3.0],
            &[1.0],
            &SimplexOptions {
                target: 0.5,
                ..Default::default()
            },
        );
        assert!(m.f <= 0.5);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let m = nelder_mead(f, &[0.5], &[0.2], &SimplexOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn halton_is_equidistributed() {
        let mut h = Halton::new(vec![0.0, 0.25, 0.5]);
        let pts: Vec<Vec<f64>> = (0..4096).map(|_| h.next_point()).collect();
        for dim in 0..3 {
            let below = pts.iter().filter(|p| p[dim] < 0.5).count();
            assert!((below as f64 / 4096.0 - 0.5).abs() < 0.01);
            assert!(pts.iter().all(|p| (0.0..1.0).contains(&p[dim])));
        }
    }
}
