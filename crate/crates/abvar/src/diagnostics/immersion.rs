use abvar_core::degeneration::{tangent_family, DegenerationModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::base_locus::zero_patterns;
use super::points::PointChart;
use super::{is_morphism_range, DiagnosticsError, Result};
use crate::rank::numerical_rank;

/// Ranks of the tangent family observed on one stratum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumRanks {
    pub stratum: usize,
    /// `g + h + 1`: the projective tangent space plus the point itself.
    pub expected: usize,
    pub ranks: Vec<usize>,
    /// Smallest retained singular value ratio over the sampled points.
    pub worst_ratio: f64,
}

impl StratumRanks {
    pub fn min_rank(&self) -> usize {
        self.ranks.iter().copied().min().unwrap_or(0)
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn is_full(&self) -> bool {
        !self.ranks.is_empty() && self.ranks.iter().all(|&r| r == self.expected)
    }
}

/// Samples `points_per_stratum` random points on every stratum
/// `h = 0..g-1` (cycling through the zero patterns of size `h`) and records
/// the numerical rank of the tangent family at each.
pub fn immersion_check(
    model: &DegenerationModel,
    points_per_stratum: usize,
    tol: f64,
    tol_rel: f64,
    seed: u64,
) -> Result<Vec<StratumRanks>> {
    let g = model.g();
    if !is_morphism_range(g, model.d()) {
        return Err(DiagnosticsError::Precondition(format!(
            "d = {} must exceed 2^(g-1) = {} for the map to be defined",
            model.d(),
            1u64 << (g - 1)
        )));
    }
    let mut out = Vec::with_capacity(g);
    for (h, patterns) in zero_patterns(g).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(h as u64);
        let samples: Vec<(PointChart, Vec<f64>)> = (0..points_per_stratum)
            .map(|i| {
                let chart = PointChart::new(g, &patterns[i % patterns.len()]);
                let unit: Vec<f64> = (0..chart.dim()).map(|_| rng.gen()).collect();
                let p = chart.from_unit(&unit);
                (chart, p)
            })
            .collect();
        let verdicts = samples
            .par_iter()
            .map(|(chart, p)| {
                let point = chart.point(model, p)?;
                let family = tangent_family(model, &point, tol)?;
                Ok(numerical_rank(&family.rows, tol_rel)?)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(StratumRanks {
            stratum: h,
            expected: g + h + 1,
            ranks: verdicts.iter().map(|v| v.rank).collect(),
            worst_ratio: verdicts
                .iter()
                .map(|v| v.retained_ratio())
                .fold(f64::INFINITY, f64::min),
        });
    }
    Ok(out)
}
