//! Numerical certification of the geometric statements about the map
//! `phi` and its one-dimensional building blocks.

mod base_locus;
mod divisibility;
mod immersion;
mod independence;
mod injectivity;
mod points;
mod product;

pub use base_locus::{base_locus_search, normalized_residual, BaseLocusOptions, BaseLocusOutcome};
pub use divisibility::degree_divisibility_scan;
pub use immersion::{immersion_check, StratumRanks};
pub use independence::{
    elliptic_independence_check, random_independence_subsets, random_separated_points,
};
pub use injectivity::{
    injectivity_search, involution_image, CollisionWitness, InjectivityOptions, InjectivityOutcome,
    SearchCoverage,
};
pub use points::{chordal, separation, PointChart};
pub use product::{product_construction_check, ProductOptions, ProductOutcome};

use abvar_core::degeneration::DegenerationError;
use abvar_core::theta::ThetaError;

use crate::rank::RankError;

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Degeneration(#[from] DegenerationError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;

/// `d > 2^(g-1)`: the sections have no common zero on the degenerate fiber.
pub fn is_morphism_range(g: usize, d: u32) -> bool {
    g <= 32 && u64::from(d) > 1u64 << (g - 1)
}

/// `d > 2^g`: the map is an embedding.
pub fn is_embedding_range(g: usize, d: u32) -> bool {
    g < 32 && u64::from(d) > 1u64 << g
}
