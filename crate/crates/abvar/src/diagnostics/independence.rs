use abvar_core::degeneration::DegenerationModel;
use abvar_core::theta::vartheta_vector;
use num_complex::Complex64;
use rand::Rng;

use super::{DiagnosticsError, Result};
use crate::rank::{numerical_rank, RankVerdict};

/// Rank of the `n x d` matrix `(vartheta_k(tau_g, x_j))_{j,k}`. The points
/// must be pairwise farther apart on `E` than the model's separation floor.
pub fn elliptic_independence_check(
    model: &DegenerationModel,
    points: &[Complex64],
    tol: f64,
    tol_rel: f64,
) -> Result<RankVerdict> {
    if points.is_empty() {
        return Err(DiagnosticsError::Precondition(
            "at least one point is required".into(),
        ));
    }
    let floor = model.options().separation_floor;
    for (i, &a) in points.iter().enumerate() {
        for (j, &b) in points.iter().enumerate().skip(i + 1) {
            let dist = model.e_distance(a, b);
            if dist <= floor {
                return Err(DiagnosticsError::Precondition(format!(
                    "points {i} and {j} are {dist:.3e} apart, below the separation floor {floor:.1e}"
                )));
            }
        }
    }
    let rows = points
        .iter()
        .map(|&x| {
            Ok(vartheta_vector(
                model.tau_g(),
                x,
                model.d(),
                tol,
                false,
                model.theta_config(),
            )?
            .values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(numerical_rank(&rows, tol_rel)?)
}

/// `n` uniformly random points of the fundamental rectangle, pairwise
/// separated by more than `min_gap` on `E` (rejection sampling).
pub fn random_separated_points(
    model: &DegenerationModel,
    n: usize,
    min_gap: f64,
    rng: &mut impl Rng,
) -> Vec<Complex64> {
    let d = f64::from(model.d());
    let mut pts: Vec<Complex64> = Vec::with_capacity(n);
    while pts.len() < n {
        let x = d * rng.gen::<f64>() + model.tau_g() * rng.gen::<f64>();
        if pts.iter().all(|&p| model.e_distance(p, x) > min_gap) {
            pts.push(x);
        }
    }
    pts
}

/// `count` random subsets for the independence sweep: each has a size drawn
/// uniformly from `1..=d-1` and points drawn by [`random_separated_points`].
pub fn random_independence_subsets(
    model: &DegenerationModel,
    count: usize,
    min_gap: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<Complex64>> {
    let max_n = (model.d() as usize).saturating_sub(1).max(1);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            random_separated_points(model, n, min_gap, rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use abvar_core::degeneration::ModelOptions;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(d: u32) -> DegenerationModel {
        DegenerationModel::new(
            1,
            d,
            &[],
            &[],
            Complex64::new(0.4, 1.1),
            ModelOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_point_has_rank_one() {
        let v = elliptic_independence_check(&line(5), &[Complex64::new(0.3, 0.2)], 1e-14, 1e-8)
            .unwrap();
        assert_eq!(v.rank, 1);
    }

    #[test]
    fn four_real_points_at_degree_five() {
        let pts: Vec<Complex64> = [0.0, 0.7, 1.9, 3.1]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let v = elliptic_independence_check(&line(5), &pts, 1e-14, 1e-8).unwrap();
        assert_eq!((v.shape, v.rank), ((4, 5), 4));
    }

    #[test]
    fn d_points_summing_to_a_divisor_of_a_section_are_dependent() {
        // The d zeros of one section: the remaining d - 1 sections span a
        // hyperplane containing all d evaluation vectors.
        let d = 5;
        let m = line(d);
        let k = 2;
        // vartheta_k vanishes at (1 + tau)/2 - k tau / d, translated by 0..d
        let z0 = (Complex64::new(1.0, 0.0) + m.tau_g()) * 0.5
            - m.tau_g() * (f64::from(k) / f64::from(d));
        let pts: Vec<Complex64> = (0..d).map(|j| z0 + f64::from(j)).collect();
        let v = elliptic_independence_check(&m, &pts, 1e-14, 1e-8).unwrap();
        assert_eq!(v.rank, d as usize - 1, "{:?}", v.singular_values);
    }

    #[test]
    fn random_subsets_at_degree_nine_are_independent() {
        let m = line(9);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for pts in random_independence_subsets(&m, 100, 1e-3, &mut rng) {
            let v = elliptic_independence_check(&m, &pts, 1e-14, 1e-8).unwrap();
            assert!(v.is_full(), "{pts:?} {:?}", v.singular_values);
        }
    }

    #[test]
    fn coincident_points_are_rejected() {
        let pts = [Complex64::new(0.3, 0.2), Complex64::new(5.3, 0.2)];
        assert!(matches!(
            elliptic_independence_check(&line(5), &pts, 1e-14, 1e-8),
            Err(DiagnosticsError::Precondition(_))
        ));
    }
}
